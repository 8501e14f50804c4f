"""
Point-set operations: density clustering, voxelization, overlap, bounds.
"""

import logging
from collections import deque
from collections.abc import Sequence

import numpy as np

from apps.core.exceptions import EmptyGeometryError, InvalidArgumentError

from .schemas import Aabb3, DbscanParams, Point3, VoxelKeySet
from .spatial_hash import SpatialHash

logger = logging.getLogger(__name__)

NOISE = -1
_UNVISITED = -2

PointsLike = Sequence[Point3] | Sequence[Sequence[float]] | np.ndarray


def as_array(points: PointsLike) -> np.ndarray:
    """Coerce a point sequence to a float64 ``(n, 3)`` array."""
    coords = np.asarray(points, dtype=np.float64)
    if coords.size == 0:
        return np.zeros((0, 3), dtype=np.float64)
    if coords.ndim != 2 or coords.shape[1] != 3:
        raise InvalidArgumentError(f"expected an (n, 3) point array, got shape {coords.shape}")
    if not np.isfinite(coords).all():
        raise InvalidArgumentError("point coordinates must be finite")
    return coords


class GeometryService:
    """Value-level geometry used by association, connectivity and the memory."""

    @classmethod
    def dbscan(cls, points: PointsLike, params: DbscanParams) -> list[int]:
        """Label each point with its cluster (0..k-1) or ``-1`` for noise.

        Clusters are numbered in the order their first core point appears in
        the input. A point's own position counts toward ``min_samples``.
        """
        coords = as_array(points)
        n = len(coords)
        if n == 0:
            return []

        index = SpatialHash(coords, params.eps)
        labels = np.full(n, _UNVISITED, dtype=np.int64)
        cluster = 0

        for seed in range(n):
            if labels[seed] != _UNVISITED:
                continue
            neighbors = index.neighbors(seed)
            if len(neighbors) < params.min_samples:
                labels[seed] = NOISE
                continue

            labels[seed] = cluster
            queue = deque(neighbors.tolist())
            while queue:
                j = queue.popleft()
                if labels[j] == NOISE:
                    # Border point: reachable but not core
                    labels[j] = cluster
                    continue
                if labels[j] != _UNVISITED:
                    continue
                labels[j] = cluster
                reach = index.neighbors(j)
                if len(reach) >= params.min_samples:
                    queue.extend(reach.tolist())
            cluster += 1

        logger.debug(f"DBSCAN eps={params.eps} min={params.min_samples}: {n} points, {cluster} clusters")
        return labels.tolist()

    @classmethod
    def voxelize(cls, points: PointsLike, cell_size: float, origin: Point3 = Point3(0.0, 0.0, 0.0)) -> VoxelKeySet:
        if not cell_size > 0:
            raise InvalidArgumentError(f"cell_size must be positive, got {cell_size}")
        coords = as_array(points)
        keys = np.floor((coords - np.asarray(origin, dtype=np.float64)) / cell_size).astype(np.int64)
        return VoxelKeySet(
            cell_size=float(cell_size),
            origin=Point3.of(origin),
            keys=frozenset(map(tuple, keys.tolist())),
        )

    @classmethod
    def jaccard(cls, a: VoxelKeySet, b: VoxelKeySet) -> float:
        if not a.same_grid(b):
            raise InvalidArgumentError("voxel sets were built on different grids")
        union = len(a.keys | b.keys)
        if union == 0:
            return 0.0
        return len(a.keys & b.keys) / union

    @classmethod
    def bounds_and_centroid(cls, points: PointsLike) -> tuple[Aabb3, Point3]:
        """Tight box and arithmetic-mean centroid (clamped into the box)."""
        coords = as_array(points)
        if len(coords) == 0:
            raise EmptyGeometryError("cannot bound an empty point set")
        lo = coords.min(axis=0)
        hi = coords.max(axis=0)
        centroid = np.clip(coords.mean(axis=0), lo, hi)
        return (
            Aabb3(Point3(*lo.tolist()), Point3(*hi.tolist())),
            Point3(*centroid.tolist()),
        )
