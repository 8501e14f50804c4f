"""
Scene memory records.
"""

import math
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from apps.core.exceptions import InvalidArgumentError, ValidationError
from apps.geometry.schemas import Aabb3, Point3

SNAPSHOT_VERSION = 1
CENTROID_TOLERANCE = 1e-9


class Component(BaseModel):
    """A persistent 3D object in the scene memory."""

    model_config = ConfigDict(frozen=True)

    component_id: int = Field(ge=0)
    centroid: Point3
    bbox: Aabb3
    caption: str = ""
    crop_refs: tuple[str, ...] = ()
    attributes: dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _centroid_inside(self) -> "Component":
        if not all(math.isfinite(v) for v in (*self.centroid, *self.bbox.flat())):
            raise ValueError("component coordinates must be finite")
        if any(lo > hi for lo, hi in zip(self.bbox.min, self.bbox.max)):
            raise ValueError(f"bbox min exceeds max: {self.bbox.flat()}")
        if not self.bbox.contains(self.centroid, CENTROID_TOLERANCE):
            raise ValueError(f"centroid {tuple(self.centroid)} lies outside bbox {self.bbox.flat()}")
        return self

    @property
    def dims(self) -> Point3:
        return self.bbox.extents

    def with_attribute(self, key: str, value: str) -> "Component":
        return self.model_copy(update={"attributes": {**self.attributes, key: value}})

    def search_text(self) -> str:
        """Caption followed by ``key value`` pairs in key order."""
        parts = [self.caption]
        parts += [f"{key} {value}" for key, value in sorted(self.attributes.items())]
        return " ".join(part for part in parts if part)

    def to_record(self) -> dict[str, Any]:
        """Snapshot line form."""
        return {
            "id": self.component_id,
            "centroid": list(self.centroid),
            "bbox": self.bbox.flat(),
            "caption": self.caption,
            "crops": list(self.crop_refs),
            "attrs": dict(self.attributes),
        }

    def to_wire(self) -> dict[str, Any]:
        return {**self.to_record(), "dims": list(self.dims)}

    @classmethod
    def from_record(cls, record: Any) -> "Component":
        if not isinstance(record, dict):
            raise ValidationError("component record must be a JSON object")
        try:
            return cls(
                component_id=record["id"],
                centroid=Point3.of(record["centroid"]),
                bbox=Aabb3.from_flat(record["bbox"]),
                caption=record.get("caption", ""),
                crop_refs=tuple(record.get("crops", ())),
                attributes={str(k): str(v) for k, v in (record.get("attrs") or {}).items()},
            )
        except KeyError as e:
            raise ValidationError(f"component record is missing {e}")
        except (TypeError, ValueError, InvalidArgumentError) as e:
            raise ValidationError(f"invalid component record: {e}")
