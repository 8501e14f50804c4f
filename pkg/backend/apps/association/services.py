"""
2D-to-3D association: canvas painting, point lookup, outlier rejection.
"""

import logging
from collections import defaultdict
from collections.abc import Sequence

import numpy as np
from pydantic import Field

from apps.bundles.rle import pixel_bbox
from apps.bundles.schemas import InstanceKey, MaskRecord, SceneBundle
from apps.core.config import SettingsConfig
from apps.core.exceptions import ValidationError
from apps.geometry.schemas import DbscanParams
from apps.geometry.services import NOISE, GeometryService
from apps.inventory.schemas import ObjectFrameIndex

from .schemas import BACKGROUND, InstancePoints, MaskCanvas

logger = logging.getLogger(__name__)


class AssociationConfig(SettingsConfig):
    settings_name = "ASSOCIATION_CONFIG"

    outlier_eps: float = Field(default=0.5, gt=0)
    outlier_min_samples: int = Field(default=5, ge=1)

    @property
    def dbscan_params(self) -> DbscanParams:
        return DbscanParams(eps=self.outlier_eps, min_samples=self.outlier_min_samples)


class AssociationService:
    @staticmethod
    def paint_order(masks: Sequence[MaskRecord]) -> list[MaskRecord]:
        """Largest bounding box first; equal areas by (slug, seq, track_id)."""
        return sorted(masks, key=lambda m: (-m.bbox_area, m.key))

    @classmethod
    def paint_canvas(
        cls,
        masks: Sequence[MaskRecord],
        width: int | None = None,
        height: int | None = None,
    ) -> MaskCanvas:
        """Paint masks onto one index map so smaller masks override larger ones."""
        if width is None or height is None:
            if not masks:
                raise ValidationError("cannot size an empty canvas without width and height")
            height, width = masks[0].rle.size

        index_map = np.full((height, width), BACKGROUND, dtype=np.int32)
        ordered = cls.paint_order(masks)
        for slot, mask in enumerate(ordered):
            if tuple(mask.rle.size) != (height, width):
                raise ValidationError(
                    f"mask {mask.key.label()} in frame {mask.frame_id} is {list(mask.rle.size)}, "
                    f"canvas is {height}x{width}"
                )
            index_map[mask.decode(width, height)] = slot
        return MaskCanvas(width=width, height=height, index_map=index_map, slots=tuple(m.key for m in ordered))

    @classmethod
    def associate(cls, bundle: SceneBundle, index: ObjectFrameIndex) -> list[InstancePoints]:
        """Accumulate feature points under each instance's masks over its frame run."""
        points: dict[InstanceKey, set[int]] = defaultdict(set)
        frame_points: dict[InstanceKey, dict[int, frozenset[int]]] = defaultdict(dict)
        boxes: dict[InstanceKey, dict[int, tuple[int, int, int, int]]] = defaultdict(dict)

        for frame in bundle.frames:
            masks = [
                m
                for m in bundle.masks_by_frame.get(frame.frame_id, [])
                if (run := index.run_for(m.object_slug, m.sequence_index)) is not None and run.covers(frame.frame_id)
            ]
            if not masks:
                continue
            canvas = cls.paint_canvas(masks, frame.width, frame.height)
            for mask in masks:
                box = pixel_bbox(mask.decode(frame.width, frame.height))
                points.setdefault(mask.key, set())
                if box is not None:
                    boxes[mask.key][frame.frame_id] = box

            observed = bundle.observations_by_frame.get(frame.frame_id)
            if observed is None or observed.point_ids.size == 0:
                continue
            slots = canvas.index_map[observed.v, observed.u]
            for slot in np.unique(slots[slots != BACKGROUND]).tolist():
                key = canvas.slots[slot]
                seen = frozenset(observed.point_ids[slots == slot].tolist())
                points[key] |= seen
                frame_points[key][frame.frame_id] = seen

        instances = [
            InstancePoints(
                key=key,
                point_ids=frozenset(points[key]),
                frame_points=frame_points.get(key, {}),
                mask_boxes=boxes.get(key, {}),
            )
            for key in sorted(points)
        ]
        logger.info(f"Associated {len(instances)} instances over {len(bundle.frames)} frames")
        return instances

    @classmethod
    def reject_outliers(
        cls,
        instances: Sequence[InstancePoints],
        bundle: SceneBundle,
        params: DbscanParams | None = None,
    ) -> list[InstancePoints]:
        """Drop DBSCAN noise points per instance; drop instances left empty."""
        params = params or AssociationConfig.from_settings().dbscan_params
        kept: list[InstancePoints] = []
        for instance in instances:
            if not instance.point_ids:
                logger.debug(f"Dropped {instance.key.label()}: no points")
                continue
            ids = sorted(instance.point_ids)
            labels = GeometryService.dbscan(bundle.positions_of(ids), params)
            inliers = frozenset(pid for pid, label in zip(ids, labels) if label != NOISE)
            if not inliers:
                logger.debug(f"Dropped {instance.key.label()}: all {len(ids)} points are outliers")
                continue
            kept.append(instance.restricted_to(inliers) if len(inliers) < len(ids) else instance)
        return kept
