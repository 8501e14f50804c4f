"""
Tool registry: specs, argument validation, dispatch and presets.
"""

import logging
from collections.abc import Callable, Iterable
from enum import StrEnum
from typing import Any

import pydantic
from pydantic import ConfigDict, StrictBool, StrictFloat, StrictInt, StrictStr, create_model

from apps.core.exceptions import ConflictError, InvalidArgumentsError, SceneMemoryError, UnknownToolError
from apps.core.metrics import TOOL_CALLS
from apps.memory.services import SceneMemory
from apps.smql.services import SmqlService

from .adapters import KvStore, register_annotate, register_kv_lookup
from .navigation import NavigationConfig
from .schemas import ParamSpec, ToolCall, ToolResult, ToolSpec
from .services import SceneTools

logger = logging.getLogger(__name__)

Handler = Callable[..., Any]

_PARAM_TYPES: dict[str, Any] = {
    "integer": StrictInt,
    "number": StrictInt | StrictFloat,
    "string": StrictStr,
    "boolean": StrictBool,
    "object": dict[str, Any],
}


def arguments_model(spec: ToolSpec) -> type[pydantic.BaseModel]:
    fields: dict[str, Any] = {}
    for name, param in spec.parameters.items():
        annotation = _PARAM_TYPES[param.type]
        fields[name] = (annotation, ...) if param.required else (annotation | None, None)
    return create_model(
        f"{spec.name.title().replace('_', '')}Arguments",
        __config__=ConfigDict(extra="forbid", allow_inf_nan=False),
        **fields,
    )


class ToolRegistry:
    """Named tools in registration order. Immutable once serving starts."""

    def __init__(self):
        self._specs: dict[str, ToolSpec] = {}
        self._handlers: dict[str, Handler] = {}
        self._models: dict[str, type[pydantic.BaseModel]] = {}

    def __contains__(self, name: str) -> bool:
        return name in self._specs

    def __len__(self) -> int:
        return len(self._specs)

    def register(self, spec: ToolSpec, handler: Handler) -> None:
        if spec.name in self._specs:
            raise ConflictError(f"tool '{spec.name}' is already registered")
        self._specs[spec.name] = spec
        self._handlers[spec.name] = handler
        self._models[spec.name] = arguments_model(spec)
        logger.debug(f"Registered tool {spec.signature()}")

    register_external = register

    def specs(self) -> list[ToolSpec]:
        return list(self._specs.values())

    def validate(self, call: ToolCall) -> dict[str, Any]:
        if call.name not in self._specs:
            raise UnknownToolError(f"unknown tool '{call.name}'")
        try:
            parsed = self._models[call.name].model_validate(call.arguments)
        except pydantic.ValidationError as e:
            fields = sorted({str(err["loc"][0]) for err in e.errors() if err["loc"]})
            raise InvalidArgumentsError(f"invalid arguments for '{call.name}': {', '.join(fields)}", fields)
        return parsed.model_dump(exclude_unset=True, exclude_none=True)

    def dispatch(self, call: ToolCall) -> ToolResult:
        """Run a call; every failure becomes an error result."""
        metric_name = call.name if call.name in self._specs else "unknown"
        try:
            arguments = self.validate(call)
            payload = self._handlers[call.name](**arguments)
        except SceneMemoryError as e:
            TOOL_CALLS.labels(tool=metric_name, outcome=e.code).inc()
            logger.info(f"Tool {call.name} failed: {e.code}: {e.message}")
            return ToolResult.failure(call.call_id, e)
        except Exception as e:
            TOOL_CALLS.labels(tool=metric_name, outcome="internal_error").inc()
            logger.exception(f"Tool {call.name} crashed")
            return ToolResult.failure(call.call_id, SceneMemoryError(f"{type(e).__name__}: {e}"))
        TOOL_CALLS.labels(tool=metric_name, outcome="ok").inc()
        return ToolResult.success(call.call_id, payload)


# =============================================================================
# STANDARD TOOLS
# =============================================================================

SEARCH = ToolSpec(
    name="search",
    description="Find components whose caption or attributes match a natural-language query (BM25 ranking).",
    parameters={
        "query": ParamSpec(type="string", description="free-text query"),
        "limit": ParamSpec(type="integer", required=False, description="maximum results, default 10"),
    },
)
DISTANCE = ToolSpec(
    name="distance",
    description="Euclidean distance in meters between the centroids of two components.",
    parameters={"a": ParamSpec(type="integer"), "b": ParamSpec(type="integer")},
)
VICINITY = ToolSpec(
    name="vicinity",
    description="Components whose centroids lie within a radius (meters) of a component, nearest first.",
    parameters={"id": ParamSpec(type="integer"), "radius": ParamSpec(type="number")},
)
NAVIGATION_DISTANCE = ToolSpec(
    name="navigation_distance",
    description="Walkable path length in meters between two components on the floor plane, avoiding obstacles.",
    parameters={"a": ParamSpec(type="integer"), "b": ParamSpec(type="integer")},
)
GET_IMAGE = ToolSpec(
    name="get_image",
    description="Representative image crop references of a component, best view first.",
    parameters={"id": ParamSpec(type="integer")},
)
EXECUTE = ToolSpec(
    name="execute",
    description=(
        "Run a scene query program. Statements end with ';' and the last value is returned. "
        "Builtins: search, components, component, centroid, bbox, dims, attr, distance, nav_distance, "
        "vicinity, dot, sub, add, scale, norm, vec, box, fits, map, filter, sort_by, min_by, max_by, "
        "count, sum, range, len, pairs, flatten, abs, sqrt. Lambdas are written |x| expr."
    ),
    parameters={"source": ParamSpec(type="string", description="program text")},
)


class ToolPreset(StrEnum):
    NONE = "none"
    SPATIAL = "spatial"
    VISUAL = "visual"
    FULL = "full"


def build_registry(
    memory: SceneMemory,
    preset: ToolPreset | str = ToolPreset.FULL,
    *,
    kv_stores: Iterable[dict[str, Any]] = (),
    nav_config: NavigationConfig | None = None,
    limits=None,
) -> ToolRegistry:
    """Registry for ``preset``: ``spatial`` < ``visual`` (+ images) < ``full`` (+ programs and adapters)."""
    preset = ToolPreset(preset)
    registry = ToolRegistry()
    if preset == ToolPreset.NONE:
        return registry

    tools = SceneTools(memory, nav_config)
    registry.register(SEARCH, tools.search)
    registry.register(DISTANCE, tools.distance)
    registry.register(VICINITY, tools.vicinity)
    registry.register(NAVIGATION_DISTANCE, tools.navigation_distance)
    if preset in (ToolPreset.VISUAL, ToolPreset.FULL):
        registry.register(GET_IMAGE, tools.get_image)
    if preset == ToolPreset.FULL:
        registry.register(EXECUTE, lambda source: SmqlService.execute(source, tools, limits))
        register_annotate(registry, memory)
        for store in kv_stores:
            register_kv_lookup(
                registry,
                KvStore.from_path(store["PATH"]),
                name=store.get("NAME", "kv_lookup"),
                description=store.get("DESCRIPTION"),
            )
    return registry
