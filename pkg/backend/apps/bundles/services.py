"""
Scene bundle loading and validation.
"""

import logging
from pathlib import Path

import numpy as np
import pydantic

from apps.core.exceptions import NotFoundError, ParseError, ValidationError
from apps.core.serialization import iter_jsonl

from .schemas import FeaturePoint, FrameRecord, MaskRecord, SceneBundle

logger = logging.getLogger(__name__)

FRAMES_FILE = "frames.jsonl"
MASKS_FILE = "masks.jsonl"
POINTS_FILE = "points.jsonl"

_BOTTOM_ROW = np.array([0.0, 0.0, 0.0, 1.0])


class BundleService:
    """Reads ``frames.jsonl``, ``masks.jsonl`` and ``points.jsonl`` from a bundle directory."""

    @classmethod
    def load_bundle(cls, path: Path | str) -> SceneBundle:
        root = Path(path)
        if not root.is_dir():
            raise NotFoundError(f"bundle directory not found: {root}")

        frames = cls._read(root / FRAMES_FILE, FrameRecord)
        masks = cls._read(root / MASKS_FILE, MaskRecord)
        points = cls._read(root / POINTS_FILE, FeaturePoint)

        frames_by_id = cls._validate_frames(frames)
        cls._validate_masks(masks, frames_by_id)
        cls._validate_points(points, frames_by_id)

        bundle = SceneBundle(
            root=root,
            frames=tuple(record for _, record in frames),
            masks=tuple(record for _, record in masks),
            points=tuple(record for _, record in points),
        )
        logger.info(
            f"Loaded bundle {root.name}: {len(bundle.frames)} frames, "
            f"{len(bundle.masks)} masks, {len(bundle.points)} points"
        )
        return bundle

    @staticmethod
    def _read(path: Path, model: type[pydantic.BaseModel]) -> list[tuple[str, pydantic.BaseModel]]:
        records = []
        for line_no, raw in iter_jsonl(path):
            position = f"{path.name}:{line_no}"
            try:
                records.append((position, model.model_validate(raw)))
            except pydantic.ValidationError as e:
                first = e.errors()[0]
                loc = ".".join(str(part) for part in first["loc"])
                raise ParseError(f"{loc}: {first['msg']}", position=position)
        return records

    @staticmethod
    def _validate_frames(frames: list[tuple[str, FrameRecord]]) -> dict[int, FrameRecord]:
        frames_by_id: dict[int, FrameRecord] = {}
        previous: int | None = None
        for position, frame in frames:
            if not np.array_equal(frame.pose_matrix[3], _BOTTOM_ROW):
                raise ValidationError(f"{position}: frame {frame.frame_id} pose bottom row must be (0,0,0,1)")
            if previous is not None and frame.frame_id <= previous:
                raise ValidationError(f"{position}: frame_id {frame.frame_id} is not strictly increasing")
            previous = frame.frame_id
            frames_by_id[frame.frame_id] = frame
        return frames_by_id

    @staticmethod
    def _validate_masks(masks: list[tuple[str, MaskRecord]], frames_by_id: dict[int, FrameRecord]) -> None:
        for position, mask in masks:
            frame = frames_by_id.get(mask.frame_id)
            if frame is None:
                raise ValidationError(f"{position}: mask references unknown frame_id {mask.frame_id}")
            if mask.track_id < 0:
                raise ValidationError(f"{position}: track_id must be >= 0, got {mask.track_id}")
            if tuple(mask.rle.size) != (frame.height, frame.width):
                raise ValidationError(
                    f"{position}: mask size {list(mask.rle.size)} does not match frame "
                    f"{frame.frame_id} ({frame.height}x{frame.width})"
                )
            if sum(mask.rle.counts) != frame.width * frame.height or min(mask.rle.counts, default=0) < 0:
                raise ValidationError(f"{position}: RLE runs do not cover {frame.height}x{frame.width} pixels")

    @staticmethod
    def _validate_points(points: list[tuple[str, FeaturePoint]], frames_by_id: dict[int, FrameRecord]) -> None:
        seen: set[int] = set()
        for position, point in points:
            if point.point_id in seen:
                raise ValidationError(f"{position}: duplicate point_id {point.point_id}")
            seen.add(point.point_id)
            for frame_id, u, v in point.observations:
                frame = frames_by_id.get(frame_id)
                if frame is None:
                    raise ValidationError(f"{position}: point {point.point_id} observed in unknown frame {frame_id}")
                if not (0 <= u < frame.width and 0 <= v < frame.height):
                    raise ValidationError(
                        f"{position}: point {point.point_id} pixel ({u}, {v}) outside frame {frame_id}"
                    )
