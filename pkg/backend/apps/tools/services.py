"""
The spatial tools over a scene memory.
"""

import logging
import math
import threading

import numpy as np

from apps.core.exceptions import EmptyGeometryError, InvalidArgumentError
from apps.memory.schemas import Component
from apps.memory.services import SceneMemory

from .navigation import NavigationConfig, NavigationService, OccupancyGrid

logger = logging.getLogger(__name__)


def sample_component_points(components: list[Component], spacing: float) -> np.ndarray:
    """Fill each component box with a lattice of points at ``spacing``."""
    chunks = []
    for component in components:
        lo = np.asarray(component.bbox.min, dtype=np.float64)
        hi = np.asarray(component.bbox.max, dtype=np.float64)
        axes = [np.linspace(a, b, max(2, int(math.ceil((b - a) / spacing)) + 1)) for a, b in zip(lo, hi)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
        chunks.append(grid)
    if not chunks:
        return np.zeros((0, 3), dtype=np.float64)
    return np.concatenate(chunks)


class SceneTools:
    """Read-mostly tool implementations shared by dispatch and the query language."""

    def __init__(self, memory: SceneMemory, nav_config: NavigationConfig | None = None):
        self.memory = memory
        self.nav_config = nav_config or NavigationConfig.from_settings()
        self._grid: OccupancyGrid | None = None
        self._grid_lock = threading.Lock()

    def search(self, query: str, limit: int = 10) -> list[dict]:
        hits = self.memory.search_text(query, limit)
        results = []
        for component_id, score in hits:
            component = self.memory.get(component_id)
            results.append(
                {
                    "id": component_id,
                    "caption": component.caption,
                    "centroid": list(component.centroid),
                    "score": score,
                }
            )
        return results

    def distance(self, a: int, b: int) -> float:
        return math.dist(self.memory.get(a).centroid, self.memory.get(b).centroid)

    def vicinity(self, id: int, radius: float) -> list[dict]:  # noqa: A002
        if radius < 0:
            raise InvalidArgumentError(f"radius must be >= 0, got {radius}")
        center = self.memory.get(id).centroid
        return [
            {"id": other, "distance": distance}
            for other, distance in self.memory.query_radius(center, float(radius))
            if other != id
        ]

    def occupancy(self) -> OccupancyGrid:
        """Built once from the stored scene points, or from component boxes when absent."""
        with self._grid_lock:
            if self._grid is None:
                points = self.memory.scene_points
                if points is None or len(points) == 0:
                    points = sample_component_points(self.memory.components(), self.nav_config.cell / 2)
                if len(points) == 0:
                    raise EmptyGeometryError("scene has no geometry to navigate")
                self._grid = NavigationService.build_occupancy(points, self.nav_config)
            return self._grid

    def navigation_distance(self, a: int, b: int) -> float:
        start = self.memory.get(a).centroid
        goal = self.memory.get(b).centroid
        return NavigationService.navigation_distance(self.occupancy(), start, goal)

    def get_image(self, id: int) -> list[str]:  # noqa: A002
        component = self.memory.get(id)
        for ref in component.crop_refs:
            self.memory.resolve_crop(ref)
        return list(component.crop_refs)
