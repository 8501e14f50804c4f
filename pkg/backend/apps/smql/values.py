"""
Runtime values of the query language and their wire form.

    number     int | float (never bool)
    string     str
    boolean    bool
    vector3    Point3
    box        Aabb3
    component  ComponentRef
    list       tuple
    map        MappingProxyType[str, value]
    nil        None
    function   Closure | Builtin
"""

import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from types import MappingProxyType
from typing import Any, NamedTuple

from apps.geometry.schemas import Aabb3, Point3

from . import ast

# ints beyond this magnitude continue as floats
EXACT_INT_LIMIT = 2**53


class ComponentRef(NamedTuple):
    component_id: int


@dataclass(frozen=True)
class Closure:
    params: tuple[str, ...]
    body: ast.Expr
    env: Mapping[str, Any]


@dataclass(frozen=True)
class Builtin:
    name: str
    fn: Callable[..., Any]
    min_args: int
    max_args: int


def is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def is_list(value: Any) -> bool:
    return type(value) is tuple


def normalize_number(value: int | float) -> int | float:
    if isinstance(value, int) and abs(value) > EXACT_INT_LIMIT:
        return float(value)
    return value


def freeze(value: Any) -> Any:
    """Convert plain Python data (tool payloads) into language values."""
    if value is None or isinstance(value, (bool, str, Point3, Aabb3, ComponentRef)):
        return value
    if is_number(value):
        return normalize_number(value)
    if isinstance(value, Mapping):
        return MappingProxyType({str(k): freeze(v) for k, v in value.items()})
    if isinstance(value, (list, tuple)):
        return tuple(freeze(v) for v in value)
    raise TypeError(f"cannot represent {type(value).__name__} as a query value")


def type_name(value: Any) -> str:
    if value is None:
        return "nil"
    if isinstance(value, bool):
        return "boolean"
    if is_number(value):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, Point3):
        return "vector"
    if isinstance(value, Aabb3):
        return "box"
    if isinstance(value, ComponentRef):
        return "component"
    if is_list(value):
        return "list"
    if isinstance(value, Mapping):
        return "map"
    if isinstance(value, (Closure, Builtin)):
        return "function"
    return type(value).__name__


def estimate_bytes(value: Any) -> int:
    """Shallow size charged against the value budget when a value is created."""
    if isinstance(value, str):
        return 48 + len(value)
    if is_list(value) or isinstance(value, Mapping):
        return 56 + 8 * len(value)
    return 0


def to_wire(value: Any, warnings: list[str]) -> Any:
    """JSON-ready form; non-finite numbers become null with a warning."""
    if value is None or isinstance(value, (bool, str)):
        return value
    if is_number(value):
        if isinstance(value, float) and not math.isfinite(value):
            warnings.append(f"non-finite number {value} serialized as null")
            return None
        return value
    if isinstance(value, ComponentRef):
        return {"component_id": value.component_id}
    if isinstance(value, Aabb3):
        return {"min": to_wire(tuple(value.min), warnings), "max": to_wire(tuple(value.max), warnings)}
    if isinstance(value, Point3):
        return [to_wire(v, warnings) for v in value]
    if is_list(value):
        return [to_wire(v, warnings) for v in value]
    if isinstance(value, Mapping):
        return {k: to_wire(v, warnings) for k, v in value.items()}
    if isinstance(value, (Closure, Builtin)):
        warnings.append("function value serialized as null")
        return None
    raise TypeError(f"cannot serialize {type(value).__name__}")
