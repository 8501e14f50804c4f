"""
Geometric value types shared by every pipeline stage.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from pydantic import BaseModel, ConfigDict, Field

from apps.core.exceptions import InvalidArgumentError


class Point3(NamedTuple):
    """A point in meters."""

    x: float
    y: float
    z: float

    @classmethod
    def of(cls, values) -> "Point3":
        """Build from any 3-sequence, rejecting non-finite coordinates."""
        if len(values) != 3:
            raise InvalidArgumentError(f"expected 3 coordinates, got {len(values)}")
        x, y, z = (float(v) for v in values)
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
            raise InvalidArgumentError(f"non-finite coordinate in {values!r}")
        return cls(x, y, z)


class Aabb3(NamedTuple):
    """Axis-aligned box, ``min <= max`` componentwise."""

    min: Point3
    max: Point3

    @property
    def extents(self) -> Point3:
        return Point3(self.max.x - self.min.x, self.max.y - self.min.y, self.max.z - self.min.z)

    @property
    def center(self) -> Point3:
        return Point3(
            (self.min.x + self.max.x) / 2,
            (self.min.y + self.max.y) / 2,
            (self.min.z + self.max.z) / 2,
        )

    def contains(self, p: Point3, tolerance: float = 0.0) -> bool:
        return all(lo - tolerance <= v <= hi + tolerance for lo, v, hi in zip(self.min, p, self.max))

    def flat(self) -> list[float]:
        """``[minx, miny, minz, maxx, maxy, maxz]``."""
        return [*self.min, *self.max]

    @classmethod
    def from_flat(cls, values) -> "Aabb3":
        if len(values) != 6:
            raise InvalidArgumentError(f"expected 6 box coordinates, got {len(values)}")
        lo, hi = Point3.of(values[:3]), Point3.of(values[3:])
        if any(a > b for a, b in zip(lo, hi)):
            raise InvalidArgumentError(f"box min exceeds max: {list(values)}")
        return cls(lo, hi)


@dataclass(frozen=True)
class VoxelKeySet:
    """Occupied cells of a regular grid anchored at ``origin``."""

    cell_size: float
    origin: Point3
    keys: frozenset[tuple[int, int, int]] = field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.keys)

    def same_grid(self, other: "VoxelKeySet") -> bool:
        return self.cell_size == other.cell_size and self.origin == other.origin


class DbscanParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps: float = Field(gt=0)
    min_samples: int = Field(ge=1)
