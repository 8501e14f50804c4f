"""
Uniform-grid spatial hash for fixed-radius neighbor queries.
"""

from collections import defaultdict
from itertools import product

import numpy as np

_OFFSETS = np.array(list(product((-1, 0, 1), repeat=3)), dtype=np.int64)


class SpatialHash:
    """Buckets points into cubic cells of width ``radius``.

    Every point within ``radius`` of a query point lies in the 27 cells around
    the query's own cell, so a neighbor query only inspects those buckets.
    """

    def __init__(self, coords: np.ndarray, radius: float):
        self.coords = coords
        self.radius = radius
        self._radius_sq = radius * radius
        self.cells = np.floor(coords / radius).astype(np.int64)

        buckets: dict[tuple[int, int, int], list[int]] = defaultdict(list)
        for index, cell in enumerate(map(tuple, self.cells.tolist())):
            buckets[cell].append(index)
        self._buckets = {cell: np.asarray(members, dtype=np.int64) for cell, members in buckets.items()}

    def neighbors(self, index: int) -> np.ndarray:
        """Indices within ``radius`` of point ``index`` (itself included), ascending."""
        chunks = []
        for offset in _OFFSETS + self.cells[index]:
            bucket = self._buckets.get(tuple(offset.tolist()))
            if bucket is not None:
                chunks.append(bucket)
        candidates = np.concatenate(chunks)
        diff = self.coords[candidates] - self.coords[index]
        dist_sq = np.einsum("ij,ij->i", diff, diff)
        return np.sort(candidates[dist_sq <= self._radius_sq])
