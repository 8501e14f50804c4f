"""
Uniform-grid index over component centroids.
"""

import math
from collections import defaultdict

import numpy as np

from apps.geometry.schemas import Point3


class SpatialGrid:
    """Buckets centroids into cubic cells.

    Queries visit occupied cells in order of their distance to the query
    point and stop once no unvisited cell can hold a closer result. Below
    ``linear_scan_below`` entries every query is a plain scan.
    """

    def __init__(self, cell: float = 1.0, linear_scan_below: int = 64):
        self.cell = cell
        self.linear_scan_below = linear_scan_below
        self.centroids: dict[int, Point3] = {}
        self._cells: dict[tuple[int, int, int], set[int]] = defaultdict(set)

    def __len__(self) -> int:
        return len(self.centroids)

    def _cell_of(self, p: Point3) -> tuple[int, int, int]:
        return (math.floor(p.x / self.cell), math.floor(p.y / self.cell), math.floor(p.z / self.cell))

    def put(self, item_id: int, centroid: Point3) -> None:
        self.remove(item_id)
        self.centroids[item_id] = centroid
        self._cells[self._cell_of(centroid)].add(item_id)

    def remove(self, item_id: int) -> None:
        centroid = self.centroids.pop(item_id, None)
        if centroid is None:
            return
        key = self._cell_of(centroid)
        self._cells[key].discard(item_id)
        if not self._cells[key]:
            del self._cells[key]

    def _cells_by_distance(self, center: Point3) -> list[tuple[float, tuple[int, int, int]]]:
        keys = list(self._cells)
        lo = np.asarray(keys, dtype=np.float64) * self.cell
        c = np.asarray(center, dtype=np.float64)
        gap = np.maximum(np.maximum(lo - c, c - (lo + self.cell)), 0.0)
        dist = np.sqrt(np.einsum("ij,ij->i", gap, gap))
        return sorted(zip(dist.tolist(), keys))

    def _scan(self, center: Point3, ids) -> list[tuple[float, int]]:
        return sorted((math.dist(self.centroids[i], center), i) for i in ids)

    def query_radius(self, center: Point3, radius: float) -> list[tuple[int, float]]:
        """``(id, distance)`` within ``radius``, ascending distance then id."""
        if len(self) < self.linear_scan_below:
            hits = self._scan(center, self.centroids)
        else:
            ids = [i for gap, key in self._cells_by_distance(center) if gap <= radius for i in self._cells[key]]
            hits = self._scan(center, ids)
        return [(i, d) for d, i in hits if d <= radius]

    def nearest(self, center: Point3, k: int) -> list[tuple[int, float]]:
        """The ``k`` closest ``(id, distance)``, ties by id."""
        if len(self) < self.linear_scan_below:
            hits = self._scan(center, self.centroids)
        else:
            hits = []
            for gap, key in self._cells_by_distance(center):
                if len(hits) >= k and gap > hits[k - 1][0]:
                    break
                hits = sorted(hits + self._scan(center, self._cells[key]))
        return [(i, d) for d, i in hits[:k]]
