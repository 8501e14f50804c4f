"""
Builtin functions of the query language.

Every builtin receives the running evaluator first. Memory-backed builtins go
through ``Evaluator.tool`` so lookup failures yield nil plus a warning; type
mistakes raise ``SmqlTypeError`` which the evaluator pins to the call site.
"""

import itertools
import math
from collections.abc import Mapping
from types import MappingProxyType
from typing import TYPE_CHECKING, Any

from apps.geometry.schemas import Aabb3, Point3
from apps.memory.schemas import Component

from .exceptions import SmqlTypeError
from .values import Builtin, Closure, ComponentRef, freeze, is_list, is_number, normalize_number, type_name

if TYPE_CHECKING:
    from .evaluator import Evaluator

BUILTINS: dict[str, Builtin] = {}


def builtin(name: str, min_args: int, max_args: int | None = None):
    def register(fn):
        BUILTINS[name] = Builtin(name, fn, min_args, min_args if max_args is None else max_args)
        return fn

    return register


# =============================================================================
# ARGUMENT COERCION
# =============================================================================


def number(value: Any, what: str = "argument") -> int | float:
    if not is_number(value):
        raise SmqlTypeError(f"{what} must be a number, got {type_name(value)}")
    return value


def integer(value: Any, what: str = "argument") -> int:
    number(value, what)
    if not math.isfinite(value) or value != int(value):
        raise SmqlTypeError(f"{what} must be an integer, got {value!r}")
    return int(value)


def string(value: Any, what: str = "argument") -> str:
    if not isinstance(value, str):
        raise SmqlTypeError(f"{what} must be a string, got {type_name(value)}")
    return value


def sequence(value: Any, what: str = "argument") -> tuple:
    if not is_list(value):
        raise SmqlTypeError(f"{what} must be a list, got {type_name(value)}")
    return value


def function(value: Any, what: str = "argument") -> Closure | Builtin:
    if not isinstance(value, (Closure, Builtin)):
        raise SmqlTypeError(f"{what} must be a function, got {type_name(value)}")
    return value


def vector(value: Any, what: str = "argument") -> Point3:
    if isinstance(value, Point3):
        return value
    if is_list(value) and len(value) == 3 and all(is_number(v) for v in value):
        return Point3(*(float(v) for v in value))
    raise SmqlTypeError(f"{what} must be a vector, got {type_name(value)}")


def component_id(value: Any) -> int:
    """Ids are accepted as integers, component refs, or maps carrying ``id``."""
    if isinstance(value, ComponentRef):
        return value.component_id
    if isinstance(value, Mapping) and "id" in value:
        value = value["id"]
    if is_number(value) and math.isfinite(value) and value == int(value):
        return int(value)
    raise SmqlTypeError(f"expected a component id, got {type_name(value)}")


def total(values) -> float:
    """Correctly rounded sum; falls back to plain addition for non-finite terms."""
    values = [float(v) for v in values]
    if all(math.isfinite(v) for v in values):
        try:
            return math.fsum(values)
        except OverflowError:
            pass
    return float(sum(values))


def comparable_keys(keys: list[Any], what: str) -> None:
    if all(is_number(k) for k in keys) or all(isinstance(k, str) for k in keys):
        return
    raise SmqlTypeError(f"{what} keys must be all numbers or all strings")


# =============================================================================
# SCENE
# =============================================================================


def component_map(component: Component) -> MappingProxyType:
    return freeze(
        {
            "id": component.component_id,
            "caption": component.caption,
            "centroid": component.centroid,
            "bbox": component.bbox,
            "dims": component.dims,
            "attrs": component.attributes,
        }
    )


@builtin("search", 1, 2)
def _search(ev: "Evaluator", text, limit=10):
    hits = ev.tool("search", ev.tools.search, string(text, "query"), integer(limit, "limit"))
    if hits is None:
        return None
    return ev.track(tuple(freeze({**hit, "centroid": Point3(*hit["centroid"])}) for hit in hits))


@builtin("components", 0)
def _components(ev: "Evaluator"):
    components = ev.memory.components()
    ev.charge(len(components))
    return ev.track(tuple(ComponentRef(c.component_id) for c in components))


@builtin("component", 1)
def _component(ev: "Evaluator", ref):
    component = ev.tool("component", ev.memory.get, component_id(ref))
    return None if component is None else component_map(component)


@builtin("centroid", 1)
def _centroid(ev: "Evaluator", ref):
    component = ev.tool("centroid", ev.memory.get, component_id(ref))
    return None if component is None else component.centroid


@builtin("bbox", 1)
def _bbox(ev: "Evaluator", ref):
    component = ev.tool("bbox", ev.memory.get, component_id(ref))
    return None if component is None else component.bbox


@builtin("dims", 1)
def _dims(ev: "Evaluator", ref):
    component = ev.tool("dims", ev.memory.get, component_id(ref))
    return None if component is None else component.dims


@builtin("attr", 2)
def _attr(ev: "Evaluator", ref, key):
    component = ev.tool("attr", ev.memory.get, component_id(ref))
    return None if component is None else component.attributes.get(string(key, "key"))


@builtin("distance", 2)
def _distance(ev: "Evaluator", a, b):
    return ev.tool("distance", ev.tools.distance, component_id(a), component_id(b))


@builtin("nav_distance", 2)
def _nav_distance(ev: "Evaluator", a, b):
    return ev.tool("nav_distance", ev.tools.navigation_distance, component_id(a), component_id(b))


@builtin("vicinity", 2)
def _vicinity(ev: "Evaluator", ref, radius):
    hits = ev.tool("vicinity", ev.tools.vicinity, component_id(ref), number(radius, "radius"))
    return None if hits is None else ev.track(freeze(hits))


# =============================================================================
# VECTORS AND BOXES
# =============================================================================


@builtin("vec", 3)
def _vec(ev: "Evaluator", x, y, z):
    return Point3(float(number(x, "x")), float(number(y, "y")), float(number(z, "z")))


@builtin("box", 2)
def _box(ev: "Evaluator", lo, hi):
    lo, hi = vector(lo, "min"), vector(hi, "max")
    if any(a > b for a, b in zip(lo, hi)):
        raise SmqlTypeError("box min must not exceed max")
    return Aabb3(lo, hi)


@builtin("add", 2)
def _add(ev: "Evaluator", a, b):
    a, b = vector(a), vector(b)
    return Point3(a.x + b.x, a.y + b.y, a.z + b.z)


@builtin("sub", 2)
def _sub(ev: "Evaluator", a, b):
    a, b = vector(a), vector(b)
    return Point3(a.x - b.x, a.y - b.y, a.z - b.z)


@builtin("scale", 2)
def _scale(ev: "Evaluator", v, factor):
    v, factor = vector(v), float(number(factor, "factor"))
    return Point3(v.x * factor, v.y * factor, v.z * factor)


@builtin("dot", 2)
def _dot(ev: "Evaluator", a, b):
    a, b = vector(a), vector(b)
    return total((a.x * b.x, a.y * b.y, a.z * b.z))


@builtin("norm", 1)
def _norm(ev: "Evaluator", v):
    return math.hypot(*vector(v))


@builtin("fits", 2)
def _fits(ev: "Evaluator", dims, container):
    """Whether an object of extents ``dims`` fits inside ``container`` under some axis swap."""
    size = vector(dims, "dims")
    space = container.extents if isinstance(container, Aabb3) else vector(container, "container")
    return any(all(d <= s for d, s in zip(perm, space)) for perm in itertools.permutations(size))


# =============================================================================
# LISTS
# =============================================================================


def _keys(ev: "Evaluator", items: tuple, fn) -> list[Any]:
    """Apply ``fn`` to each item; unlocated errors are pinned to the enclosing call."""
    fn = function(fn)
    ev.charge(len(items))
    return [ev.apply(fn, [item]) for item in items]


@builtin("map", 2)
def _map(ev: "Evaluator", items, fn):
    items = sequence(items)
    return ev.track(tuple(_keys(ev, items, fn)))


@builtin("filter", 2)
def _filter(ev: "Evaluator", items, fn):
    items = sequence(items)
    keep = _keys(ev, items, fn)
    if not all(isinstance(k, bool) for k in keep):
        raise SmqlTypeError("filter predicate must return booleans")
    return ev.track(tuple(item for item, k in zip(items, keep) if k))


@builtin("sort_by", 2)
def _sort_by(ev: "Evaluator", items, fn):
    items = sequence(items)
    keys = _keys(ev, items, fn)
    comparable_keys(keys, "sort_by")
    order = sorted(range(len(items)), key=lambda i: keys[i])
    return ev.track(tuple(items[i] for i in order))


def _extreme(ev: "Evaluator", items, fn, what: str, better) -> Any:
    items = sequence(items)
    if not items:
        return None
    keys = _keys(ev, items, fn)
    comparable_keys(keys, what)
    best = 0
    for i in range(1, len(items)):
        if better(keys[i], keys[best]):
            best = i
    return items[best]


@builtin("min_by", 2)
def _min_by(ev: "Evaluator", items, fn):
    return _extreme(ev, items, fn, "min_by", lambda a, b: a < b)


@builtin("max_by", 2)
def _max_by(ev: "Evaluator", items, fn):
    return _extreme(ev, items, fn, "max_by", lambda a, b: a > b)


@builtin("count", 1, 2)
def _count(ev: "Evaluator", items, fn=None):
    items = sequence(items)
    if fn is None:
        return len(items)
    keep = _keys(ev, items, fn)
    if not all(isinstance(k, bool) for k in keep):
        raise SmqlTypeError("count predicate must return booleans")
    return sum(1 for k in keep if k)


@builtin("sum", 1, 2)
def _sum(ev: "Evaluator", items, fn=None):
    items = sequence(items)
    values = list(items) if fn is None else _keys(ev, items, fn)
    ev.charge(len(values))
    for v in values:
        number(v, "sum element")
    if all(isinstance(v, int) for v in values):
        return normalize_number(sum(values))
    return total(values)


@builtin("range", 1, 2)
def _range(ev: "Evaluator", start, stop=None):
    if stop is None:
        start, stop = 0, start
    start, stop = integer(start, "start"), integer(stop, "stop")
    ev.check_list_len(max(0, stop - start))
    ev.charge(max(0, stop - start))
    return ev.track(tuple(range(start, stop)))


@builtin("len", 1)
def _len(ev: "Evaluator", value):
    if isinstance(value, (str, Mapping)) or is_list(value):
        return len(value)
    raise SmqlTypeError(f"len() needs a list, string or map, got {type_name(value)}")


@builtin("pairs", 1)
def _pairs(ev: "Evaluator", items):
    """All unordered pairs ``[a, b]`` with ``a`` before ``b``."""
    items = sequence(items)
    n = len(items)
    ev.check_list_len(n * (n - 1) // 2)
    ev.charge(n * (n - 1) // 2)
    return ev.track(tuple(ev.track((a, b)) for a, b in itertools.combinations(items, 2)))


@builtin("flatten", 1)
def _flatten(ev: "Evaluator", items):
    items = sequence(items)
    out: list[Any] = []
    for item in items:
        if is_list(item):
            out.extend(item)
        else:
            out.append(item)
        ev.check_list_len(len(out))
    ev.charge(len(out))
    return ev.track(tuple(out))


# =============================================================================
# NUMBERS
# =============================================================================


@builtin("abs", 1)
def _abs(ev: "Evaluator", value):
    return normalize_number(abs(number(value)))


@builtin("sqrt", 1)
def _sqrt(ev: "Evaluator", value):
    value = number(value)
    return math.sqrt(value) if value >= 0 or math.isnan(value) else math.nan
