"""
External tool adapters.

``kv_lookup`` answers from a file-backed key/text store (regulations, equipment
profiles, price lists). ``annotate`` writes facts back into the memory as
component attributes so later searches can find them.
"""

import logging
from pathlib import Path
from typing import TYPE_CHECKING

from apps.core.exceptions import IoError, NotFoundError, ParseError
from apps.core.serialization import loads
from apps.memory.services import SceneMemory

from .schemas import ParamSpec, ToolSpec

if TYPE_CHECKING:
    from .registry import ToolRegistry

logger = logging.getLogger(__name__)


class KvStore:
    """Read-only ``key -> text`` mapping."""

    def __init__(self, data: dict[str, str]):
        self._data = dict(data)

    def __len__(self) -> int:
        return len(self._data)

    @classmethod
    def from_path(cls, path: Path | str) -> "KvStore":
        path = Path(path)
        try:
            raw = loads(path.read_bytes())
        except FileNotFoundError:
            raise NotFoundError(f"key-value store not found: {path}")
        except OSError as e:
            raise IoError(f"cannot read key-value store {path}: {e}")
        except ValueError as e:
            raise ParseError(f"invalid JSON: {e}", position=str(path))
        if not isinstance(raw, dict):
            raise ParseError("key-value store must be a JSON object", position=str(path))
        logger.info(f"Loaded {len(raw)} entries from {path}")
        return cls({str(k): v if isinstance(v, str) else str(v) for k, v in raw.items()})

    def lookup(self, key: str) -> str:
        try:
            return self._data[key]
        except KeyError:
            raise NotFoundError(f"no entry for key '{key}'")


def register_kv_lookup(
    registry: "ToolRegistry",
    store: KvStore,
    *,
    name: str = "kv_lookup",
    description: str | None = None,
) -> ToolSpec:
    spec = ToolSpec(
        name=name,
        description=description or "Look up reference text (specifications, regulations, prices) by exact key.",
        parameters={"key": ParamSpec(type="string", description="entry key")},
    )
    registry.register_external(spec, store.lookup)
    return spec


ANNOTATE = ToolSpec(
    name="annotate",
    description="Attach a textual fact to a component as a key/value attribute; it becomes searchable.",
    parameters={
        "id": ParamSpec(type="integer"),
        "key": ParamSpec(type="string", description="attribute name"),
        "value": ParamSpec(type="string", description="attribute text"),
    },
)


def register_annotate(registry: "ToolRegistry", memory: SceneMemory) -> ToolSpec:
    def annotate(id: int, key: str, value: str) -> dict:  # noqa: A002
        return memory.append_attribute(id, key, value).to_wire()

    registry.register_external(ANNOTATE, annotate)
    return ANNOTATE
