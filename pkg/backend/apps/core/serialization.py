"""
Canonical JSON helpers (orjson, sorted keys, compact separators).
"""

from collections.abc import Iterator
from pathlib import Path
from typing import Any

import orjson

from apps.core.exceptions import NotFoundError, ParseError

CANONICAL_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_NON_STR_KEYS


def dumps(value: Any) -> bytes:
    """Serialize to canonical JSON bytes."""
    return orjson.dumps(value, option=CANONICAL_OPTIONS)


def dumps_str(value: Any) -> str:
    return dumps(value).decode("utf-8")


def loads(data: bytes | str) -> Any:
    return orjson.loads(data)


def iter_jsonl(path: Path) -> Iterator[tuple[int, Any]]:
    """Yield ``(line_number, record)`` for each non-blank line of a JSONL file.

    Raises ``NotFoundError`` for a missing file and ``ParseError`` naming
    ``file:line`` for undecodable lines.
    """
    if not path.is_file():
        raise NotFoundError(f"file not found: {path}")
    with path.open("rb") as handle:
        for line_no, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                yield line_no, orjson.loads(raw)
            except orjson.JSONDecodeError as e:
                raise ParseError(f"invalid JSON: {e}", position=f"{path.name}:{line_no}")


def write_jsonl(path: Path, records: list[Any]) -> None:
    """Write records as canonical JSON lines, replacing the file atomically."""
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("wb") as handle:
        for record in records:
            handle.write(dumps(record))
            handle.write(b"\n")
    tmp.replace(path)
