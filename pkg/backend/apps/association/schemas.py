"""
Association types: per-frame mask canvases and per-instance point sets.
"""

from dataclasses import dataclass, field

import numpy as np

from apps.bundles.schemas import InstanceKey

BACKGROUND = -1


@dataclass(frozen=True)
class MaskCanvas:
    """An ``(height, width)`` map of mask slots; ``-1`` is background."""

    width: int
    height: int
    index_map: np.ndarray
    slots: tuple[InstanceKey, ...]

    def slot_of(self, u: int, v: int) -> int:
        return int(self.index_map[v, u])


@dataclass(frozen=True)
class InstancePoints:
    """3D points accumulated for one tracked instance.

    ``frame_points`` records which of the points were seen inside the
    instance's mask in each frame; ``mask_boxes`` the mask's pixel box there.
    """

    key: InstanceKey
    point_ids: frozenset[int]
    frame_points: dict[int, frozenset[int]] = field(default_factory=dict)
    mask_boxes: dict[int, tuple[int, int, int, int]] = field(default_factory=dict)

    def restricted_to(self, point_ids: frozenset[int]) -> "InstancePoints":
        return InstancePoints(
            key=self.key,
            point_ids=point_ids,
            frame_points={f: pts & point_ids for f, pts in self.frame_points.items() if pts & point_ids},
            mask_boxes=dict(self.mask_boxes),
        )
