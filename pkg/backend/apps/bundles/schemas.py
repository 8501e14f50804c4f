"""
Scene bundle records: posed frames, tracked instance masks, feature points.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from apps.geometry.schemas import Point3

from .rle import decode_rle


class InstanceKey(NamedTuple):
    """One tracked observation of an object: (slug, sequence, track)."""

    object_slug: str
    sequence_index: int
    track_id: int

    @property
    def sequence_key(self) -> tuple[int, str]:
        """The (sequence_index, object_slug) pair the merge constraint compares."""
        return (self.sequence_index, self.object_slug)

    def label(self) -> str:
        return f"{self.object_slug}#{self.sequence_index}/{self.track_id}"


class _Record(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="ignore")


class FrameRecord(_Record):
    frame_id: int
    pose: tuple[float, ...]
    image_ref: str = Field(alias="image", min_length=1)
    width: int = Field(gt=0)
    height: int = Field(gt=0)

    @field_validator("pose")
    @classmethod
    def _pose_shape(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if len(value) != 16:
            raise ValueError(f"pose must have 16 entries, got {len(value)}")
        if not all(math.isfinite(v) for v in value):
            raise ValueError("pose entries must be finite")
        return value

    @property
    def pose_matrix(self) -> np.ndarray:
        """Camera-to-world transform as a 4x4 array."""
        return np.asarray(self.pose, dtype=np.float64).reshape(4, 4)


class RleMask(_Record):
    size: tuple[int, int]
    counts: list[int]


class MaskRecord(_Record):
    frame_id: int
    object_slug: str = Field(alias="slug", min_length=1)
    sequence_index: int = Field(alias="seq", ge=0)
    track_id: int
    rle: RleMask
    bbox_area: int = Field(ge=0)

    @property
    def key(self) -> InstanceKey:
        return InstanceKey(self.object_slug, self.sequence_index, self.track_id)

    def decode(self, width: int, height: int) -> np.ndarray:
        return decode_rle(self.rle.model_dump(), width, height)


class FeaturePoint(_Record):
    point_id: int
    position: Point3 = Field(alias="xyz")
    observations: tuple[tuple[int, float, float], ...] = Field(alias="obs", default=())


@dataclass(frozen=True)
class FrameObservations:
    """Feature-point observations in one frame as parallel arrays."""

    point_ids: np.ndarray
    u: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class SceneBundle:
    """A validated, immutable ingest bundle."""

    root: Path
    frames: tuple[FrameRecord, ...]
    masks: tuple[MaskRecord, ...]
    points: tuple[FeaturePoint, ...]
    warnings: tuple[str, ...] = field(default=())

    @cached_property
    def frames_by_id(self) -> dict[int, FrameRecord]:
        return {frame.frame_id: frame for frame in self.frames}

    @cached_property
    def masks_by_frame(self) -> dict[int, list[MaskRecord]]:
        grouped: dict[int, list[MaskRecord]] = {}
        for mask in self.masks:
            grouped.setdefault(mask.frame_id, []).append(mask)
        return grouped

    @cached_property
    def instance_keys(self) -> list[InstanceKey]:
        return sorted({mask.key for mask in self.masks})

    @cached_property
    def positions(self) -> np.ndarray:
        """``(n, 3)`` feature-point positions in file order."""
        if not self.points:
            return np.zeros((0, 3), dtype=np.float64)
        return np.asarray([p.position for p in self.points], dtype=np.float64)

    @cached_property
    def point_rows(self) -> dict[int, int]:
        return {p.point_id: row for row, p in enumerate(self.points)}

    @cached_property
    def observations_by_frame(self) -> dict[int, FrameObservations]:
        per_frame: dict[int, tuple[list[int], list[float], list[float]]] = {}
        for point in self.points:
            for frame_id, u, v in point.observations:
                ids, us, vs = per_frame.setdefault(frame_id, ([], [], []))
                ids.append(point.point_id)
                us.append(u)
                vs.append(v)
        return {
            frame_id: FrameObservations(
                point_ids=np.asarray(ids, dtype=np.int64),
                u=np.floor(np.asarray(us, dtype=np.float64)).astype(np.int64),
                v=np.floor(np.asarray(vs, dtype=np.float64)).astype(np.int64),
            )
            for frame_id, (ids, us, vs) in per_frame.items()
        }

    @cached_property
    def voxel_origin(self) -> Point3:
        """Global AABB minimum of the feature points (origin when empty)."""
        if not self.points:
            return Point3(0.0, 0.0, 0.0)
        return Point3(*self.positions.min(axis=0).tolist())

    def positions_of(self, point_ids) -> np.ndarray:
        """Positions for ``point_ids`` in ascending id order."""
        rows = [self.point_rows[pid] for pid in sorted(point_ids)]
        if not rows:
            return np.zeros((0, 3), dtype=np.float64)
        return self.positions[rows]

    def image_path(self, frame_id: int) -> Path:
        return self.root / self.frames_by_id[frame_id].image_ref
