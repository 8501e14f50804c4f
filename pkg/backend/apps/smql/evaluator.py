"""
Tree-walking evaluator with step, value-size and call-depth budgets.
"""

import logging
import math
import operator
from collections import ChainMap
from collections.abc import Mapping
from types import MappingProxyType
from typing import Any

from apps.core.exceptions import SceneMemoryError
from apps.geometry.schemas import Aabb3, Point3
from apps.tools.services import SceneTools

from . import ast
from .builtins import BUILTINS
from .exceptions import ResourceLimitError, SmqlError, SmqlTypeError, UnknownFunctionError
from .schemas import SmqlLimits
from .values import (
    Builtin,
    Closure,
    estimate_bytes,
    is_list,
    is_number,
    normalize_number,
    type_name,
)

logger = logging.getLogger(__name__)

MAX_WARNINGS = 100

_ORDERING = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge}


def values_equal(a: Any, b: Any) -> bool:
    if type_name(a) != type_name(b):
        return False
    if is_list(a):
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, Mapping):
        return a.keys() == b.keys() and all(values_equal(a[k], b[k]) for k in a)
    return a == b


def divide(left: int | float, right: int | float) -> float:
    """IEEE division: x/0 is a signed infinity, 0/0 is NaN."""
    if right == 0:
        if left == 0 or math.isnan(left):
            return math.nan
        return math.copysign(math.inf, left) * math.copysign(1.0, right)
    return float(left) / float(right)


class Evaluator:
    """Evaluates one program against the scene tools. Not reusable across programs."""

    def __init__(self, tools: SceneTools, limits: SmqlLimits):
        self.tools = tools
        self.memory = tools.memory
        self.limits = limits
        self.builtins: dict[str, Builtin] = BUILTINS
        self.steps = 0
        self.bytes_used = 0
        self.depth = 0
        self.warnings: list[str] = []

    # =========================================================================
    # BUDGETS
    # =========================================================================

    def charge(self, steps: int = 1) -> None:
        self.steps += steps
        if self.steps > self.limits.max_steps:
            raise ResourceLimitError("max_steps", f"evaluation exceeded {self.limits.max_steps} steps")

    def check_list_len(self, length: int) -> None:
        if length > self.limits.max_list_len:
            raise ResourceLimitError(
                "max_list_len", f"list of {length} elements exceeds the limit of {self.limits.max_list_len}"
            )

    def track(self, value: Any) -> Any:
        """Account for a newly created container or string."""
        if is_list(value):
            self.check_list_len(len(value))
        self.bytes_used += estimate_bytes(value)
        if self.bytes_used > self.limits.max_values_bytes:
            raise ResourceLimitError(
                "max_values_bytes", f"values exceed the budget of {self.limits.max_values_bytes} bytes"
            )
        return value

    def warn(self, message: str) -> None:
        if len(self.warnings) < MAX_WARNINGS:
            self.warnings.append(message)

    def tool(self, name: str, fn, *args) -> Any:
        """Call into the memory; domain failures become nil plus a warning."""
        try:
            return fn(*args)
        except SmqlError:
            raise
        except SceneMemoryError as e:
            self.warn(f"{name}: {e.code}: {e.message}")
            return None

    # =========================================================================
    # EVALUATION
    # =========================================================================

    def run(self, program: ast.Program) -> Any:
        env: dict[str, Any] = {}
        result = None
        for stmt in program.statements:
            if isinstance(stmt, ast.Let):
                if stmt.name in env:
                    raise SmqlTypeError(f"'{stmt.name}' is already bound", line=stmt.line, column=stmt.column)
                result = env[stmt.name] = self.eval(stmt.value, env)
            else:
                result = self.eval(stmt.expr, env)
        return result

    def eval(self, node: ast.Expr, env: Mapping[str, Any]) -> Any:
        self.charge()
        match node:
            case ast.Num(value=value):
                return value
            case ast.Str(value=value):
                return value
            case ast.Bool(value=value):
                return value
            case ast.Nil():
                return None
            case ast.Name():
                return self._lookup(node, env)
            case ast.ListLit(items=items):
                return self.track(tuple(self.eval(item, env) for item in items))
            case ast.Unary():
                return self._unary(node, self.eval(node.operand, env))
            case ast.Binary(op="and" | "or"):
                return self._logical(node, env)
            case ast.Binary():
                return self._binary(node, self.eval(node.left, env), self.eval(node.right, env))
            case ast.Call():
                return self._call(node, env)
            case ast.Lambda(params=params, body=body):
                return Closure(params, body, MappingProxyType(dict(env)))
            case ast.Index():
                return self._index(node, self.eval(node.target, env), self.eval(node.index, env))
            case ast.If():
                cond = self.eval(node.cond, env)
                if not isinstance(cond, bool):
                    raise self._type_error(node, f"condition must be a boolean, got {type_name(cond)}")
                return self.eval(node.then if cond else node.orelse, env)
        raise SmqlTypeError(f"cannot evaluate {type(node).__name__}")

    @staticmethod
    def _type_error(node: ast.Node | None, message: str) -> SmqlTypeError:
        if node is None:
            return SmqlTypeError(message)
        return SmqlTypeError(message, line=node.line, column=node.column)

    def _lookup(self, node: ast.Name, env: Mapping[str, Any]) -> Any:
        if node.id in env:
            return env[node.id]
        if node.id in self.builtins:
            return self.builtins[node.id]
        raise self._type_error(node, f"unbound name '{node.id}'")

    def _unary(self, node: ast.Unary, operand: Any) -> Any:
        if node.op == "not":
            if not isinstance(operand, bool):
                raise self._type_error(node, f"'not' needs a boolean, got {type_name(operand)}")
            return not operand
        if not is_number(operand):
            raise self._type_error(node, f"cannot negate {type_name(operand)}")
        return normalize_number(-operand)

    def _logical(self, node: ast.Binary, env: Mapping[str, Any]) -> bool:
        left = self.eval(node.left, env)
        if not isinstance(left, bool):
            raise self._type_error(node, f"'{node.op}' needs booleans, got {type_name(left)}")
        if (node.op == "and" and not left) or (node.op == "or" and left):
            return left
        right = self.eval(node.right, env)
        if not isinstance(right, bool):
            raise self._type_error(node, f"'{node.op}' needs booleans, got {type_name(right)}")
        return right

    def _binary(self, node: ast.Binary, left: Any, right: Any) -> Any:
        op = node.op
        if op == "==":
            return values_equal(left, right)
        if op == "!=":
            return not values_equal(left, right)
        if op in ("<", "<=", ">", ">="):
            comparable = (is_number(left) and is_number(right)) or (isinstance(left, str) and isinstance(right, str))
            if not comparable:
                raise self._type_error(node, f"cannot compare {type_name(left)} {op} {type_name(right)}")
            return _ORDERING[op](left, right)
        if op == "+":
            if isinstance(left, str) and isinstance(right, str):
                return self.track(left + right)
            if is_list(left) and is_list(right):
                return self.track(left + right)
        if is_number(left) and is_number(right):
            if op == "+":
                return normalize_number(left + right)
            if op == "-":
                return normalize_number(left - right)
            if op == "*":
                return normalize_number(left * right)
            if op == "/":
                return divide(left, right)
        raise self._type_error(node, f"unsupported operands {type_name(left)} {op} {type_name(right)}")

    def _index(self, node: ast.Index, target: Any, index: Any) -> Any:
        if isinstance(target, Mapping):
            if not isinstance(index, str):
                raise self._type_error(node, f"map keys are strings, got {type_name(index)}")
            return target.get(index)
        if not (is_list(target) or isinstance(target, (Point3, Aabb3, str))):
            raise self._type_error(node, f"cannot index {type_name(target)}")
        if not (is_number(index) and math.isfinite(index) and index == int(index)):
            raise self._type_error(node, f"index must be an integer, got {index!r}")
        position = int(index)
        if not 0 <= position < len(target):
            self.warn(f"index {position} out of range for {type_name(target)} of length {len(target)}")
            return None
        return target[position]

    def _call(self, node: ast.Call, env: Mapping[str, Any]) -> Any:
        if node.func in env:
            fn = env[node.func]
            if not isinstance(fn, (Closure, Builtin)):
                raise self._type_error(node, f"'{node.func}' is a {type_name(fn)}, not a function")
        elif node.func in self.builtins:
            fn = self.builtins[node.func]
        else:
            raise UnknownFunctionError(f"unknown function '{node.func}'", line=node.line, column=node.column)
        args = [self.eval(arg, env) for arg in node.args]
        return self.apply(fn, args, node)

    def apply(self, fn: Closure | Builtin, args: list[Any], node: ast.Node | None = None) -> Any:
        """Call a function value; errors without a position are pinned to ``node`` when given."""
        if isinstance(fn, Closure):
            if len(args) != len(fn.params):
                raise self._type_error(node, f"lambda takes {len(fn.params)} arguments, got {len(args)}")
            if self.depth >= self.limits.max_call_depth:
                raise ResourceLimitError(
                    "max_call_depth", f"lambda application deeper than {self.limits.max_call_depth}"
                )
            self.depth += 1
            try:
                return self.eval(fn.body, ChainMap(dict(zip(fn.params, args)), fn.env))
            finally:
                self.depth -= 1

        if not fn.min_args <= len(args) <= fn.max_args:
            expected = str(fn.min_args) if fn.min_args == fn.max_args else f"{fn.min_args}-{fn.max_args}"
            raise self._type_error(node, f"{fn.name}() takes {expected} arguments, got {len(args)}")
        try:
            return fn.fn(self, *args)
        except SmqlError as e:
            if node is None:
                raise
            raise e.located(node.line, node.column)
