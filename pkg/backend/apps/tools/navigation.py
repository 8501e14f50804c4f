"""
Floor-plane occupancy grid and obstacle-aware path length.
"""

import heapq
import logging
import math
from dataclasses import dataclass

import numpy as np
from pydantic import Field
from scipy import ndimage

from apps.core.config import SettingsConfig
from apps.core.exceptions import EmptyGeometryError, OutOfBoundsError, UnreachableError
from apps.geometry.schemas import Point3
from apps.geometry.services import as_array

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)

_MOVES = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if (dx, dy) != (0, 0)]


class NavigationConfig(SettingsConfig):
    settings_name = "NAVIGATION_CONFIG"

    cell: float = Field(default=0.1, gt=0)
    floor_percentile: float = Field(default=5.0, ge=0, le=100)
    band_low: float = Field(default=0.05, ge=0)
    band_high: float = Field(default=1.8, gt=0)
    inflation: float = Field(default=0.2, ge=0)

    @property
    def inflation_cells(self) -> int:
        return int(round(self.inflation / self.cell))


@dataclass(frozen=True)
class OccupancyGrid:
    """``occupied[ix, iy]`` over cells of side ``cell`` starting at ``origin``."""

    cell: float
    origin: Point3
    occupied: np.ndarray
    floor_z: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.occupied.shape

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        ix = math.floor((x - self.origin.x) / self.cell)
        iy = math.floor((y - self.origin.y) / self.cell)
        nx, ny = self.shape
        if not (0 <= ix < nx and 0 <= iy < ny):
            raise OutOfBoundsError(f"floor position ({x:.3f}, {y:.3f}) lies outside the occupancy grid")
        return ix, iy


def disk(radius: int) -> np.ndarray:
    """Boolean structuring element of cells within ``radius`` of the center."""
    span = np.arange(-radius, radius + 1)
    dx, dy = np.meshgrid(span, span, indexing="ij")
    return dx * dx + dy * dy <= radius * radius


class NavigationService:
    @classmethod
    def build_occupancy(cls, points, config: NavigationConfig | None = None) -> OccupancyGrid:
        """Rasterize points in the height band above the estimated floor, then inflate."""
        config = config or NavigationConfig.from_settings()
        coords = as_array(points)
        if len(coords) == 0:
            raise EmptyGeometryError("cannot build an occupancy grid without points")

        floor_z = float(np.percentile(coords[:, 2], config.floor_percentile))
        margin = config.inflation_cells + 1
        lo = coords[:, :2].min(axis=0) - margin * config.cell
        hi = coords[:, :2].max(axis=0) + margin * config.cell
        shape = tuple((np.floor((hi - lo) / config.cell).astype(np.int64) + 1).tolist())

        height = coords[:, 2] - floor_z
        band = coords[(height > config.band_low) & (height <= config.band_high)]
        occupied = np.zeros(shape, dtype=bool)
        if len(band):
            cells = np.floor((band[:, :2] - lo) / config.cell).astype(np.int64)
            occupied[cells[:, 0], cells[:, 1]] = True
        if config.inflation_cells > 0 and occupied.any():
            occupied = ndimage.binary_dilation(occupied, structure=disk(config.inflation_cells))

        logger.debug(f"Occupancy grid {shape} at floor z={floor_z:.3f}: {int(occupied.sum())} occupied cells")
        return OccupancyGrid(
            cell=config.cell,
            origin=Point3(float(lo[0]), float(lo[1]), floor_z),
            occupied=occupied,
            floor_z=floor_z,
        )

    @staticmethod
    def nearest_free(grid: OccupancyGrid, cell: tuple[int, int]) -> tuple[int, int]:
        if not grid.occupied[cell]:
            return cell
        if grid.occupied.all():
            raise UnreachableError("the occupancy grid has no free cells")
        _, indices = ndimage.distance_transform_edt(grid.occupied, return_indices=True)
        return int(indices[0][cell]), int(indices[1][cell])

    @staticmethod
    def neighbors(occupied: np.ndarray, cell: tuple[int, int]):
        """Free 8-connected neighbors; diagonals need both adjacent orthogonals free."""
        nx, ny = occupied.shape
        x, y = cell
        for dx, dy in _MOVES:
            tx, ty = x + dx, y + dy
            if not (0 <= tx < nx and 0 <= ty < ny) or occupied[tx, ty]:
                continue
            if dx and dy and (occupied[x + dx, y] or occupied[x, y + dy]):
                continue
            yield (tx, ty), bool(dx and dy)

    @classmethod
    def grid_path_length(cls, grid: OccupancyGrid, start: tuple[int, int], goal: tuple[int, int]) -> float:
        """A* over free cells; returns meters or raises ``UnreachableError``."""
        if grid.occupied[start] or grid.occupied[goal]:
            raise UnreachableError("start or goal cell is occupied")

        def heuristic(c: tuple[int, int]) -> float:
            return math.hypot(c[0] - goal[0], c[1] - goal[1])

        # g tracked as (straight moves, diagonal moves) so the length is exact
        best: dict[tuple[int, int], float] = {start: 0.0}
        moves: dict[tuple[int, int], tuple[int, int]] = {start: (0, 0)}
        frontier = [(heuristic(start), 0.0, start)]
        closed: set[tuple[int, int]] = set()
        while frontier:
            _, g, current = heapq.heappop(frontier)
            if current in closed:
                continue
            if current == goal:
                straight, diagonal = moves[current]
                return (straight + diagonal * SQRT2) * grid.cell
            closed.add(current)
            for neighbor, is_diagonal in cls.neighbors(grid.occupied, current):
                if neighbor in closed:
                    continue
                tentative = g + (SQRT2 if is_diagonal else 1.0)
                if tentative < best.get(neighbor, math.inf):
                    best[neighbor] = tentative
                    straight, diagonal = moves[current]
                    moves[neighbor] = (straight, diagonal + 1) if is_diagonal else (straight + 1, diagonal)
                    heapq.heappush(frontier, (tentative + heuristic(neighbor), tentative, neighbor))
        raise UnreachableError("no free path between the two positions")

    @classmethod
    def navigation_distance(cls, grid: OccupancyGrid, a: Point3, b: Point3) -> float:
        """Path length between the free cells nearest each floor projection."""
        start = cls.nearest_free(grid, grid.cell_of(a.x, a.y))
        goal = cls.nearest_free(grid, grid.cell_of(b.x, b.y))
        return cls.grid_path_length(grid, start, goal)
