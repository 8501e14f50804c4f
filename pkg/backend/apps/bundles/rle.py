"""
Uncompressed COCO run-length encoding (column-major, zero run first).
"""

import numpy as np

from apps.core.exceptions import ParseError


def encode_rle(mask: np.ndarray) -> dict:
    """Encode a binary ``(height, width)`` mask to ``{"size": [h, w], "counts": [...]}``."""
    binary = np.asarray(mask, dtype=bool)
    height, width = binary.shape
    flat = binary.ravel(order="F")
    if flat.size == 0:
        return {"size": [height, width], "counts": []}

    changes = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    boundaries = np.concatenate(([0], changes, [flat.size]))
    counts = np.diff(boundaries).tolist()
    if flat[0]:
        counts.insert(0, 0)
    return {"size": [height, width], "counts": counts}


def decode_rle(rle: dict, width: int, height: int) -> np.ndarray:
    """Decode to a boolean ``(height, width)`` array.

    Raises ``ParseError`` when the runs do not cover exactly ``width * height``
    pixels or when ``size`` disagrees with the requested dimensions.
    """
    counts = rle.get("counts", [])
    size = list(rle.get("size", [height, width]))
    if size != [height, width]:
        raise ParseError(f"RLE size {size} does not match frame {height}x{width}")
    runs = np.asarray(counts, dtype=np.int64)
    if runs.size and runs.min() < 0:
        raise ParseError("RLE run lengths must be non-negative")
    if int(runs.sum()) != width * height:
        raise ParseError(f"RLE runs sum to {int(runs.sum())}, expected {width * height}")

    values = np.repeat(np.arange(runs.size) % 2 == 1, runs)
    return values.reshape((height, width), order="F")


def pixel_bbox(mask: np.ndarray) -> tuple[int, int, int, int] | None:
    """``(u0, v0, u1, v1)`` with exclusive upper bounds, or ``None`` for an empty mask."""
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    if rows.size == 0:
        return None
    return int(cols[0]), int(rows[0]), int(cols[-1]) + 1, int(rows[-1]) + 1
