"""
Syntax tree of scene query programs and a fully parenthesizing printer.

Nodes are frozen dataclasses. Source positions are carried for error
reporting but excluded from equality, so a reparsed printout compares equal
to the tree it came from.
"""

from dataclasses import dataclass, field
from typing import Union

BINARY_OPERATORS = ("or", "and", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/")
UNARY_OPERATORS = ("-", "not")


@dataclass(frozen=True)
class Node:
    line: int = field(default=0, compare=False, kw_only=True, repr=False)
    column: int = field(default=0, compare=False, kw_only=True, repr=False)


@dataclass(frozen=True)
class Num(Node):
    value: int | float


@dataclass(frozen=True)
class Str(Node):
    value: str


@dataclass(frozen=True)
class Bool(Node):
    value: bool


@dataclass(frozen=True)
class Nil(Node):
    pass


@dataclass(frozen=True)
class Name(Node):
    id: str


@dataclass(frozen=True)
class ListLit(Node):
    items: tuple["Expr", ...]


@dataclass(frozen=True)
class Unary(Node):
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Binary(Node):
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call(Node):
    func: str
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Lambda(Node):
    params: tuple[str, ...]
    body: "Expr"


@dataclass(frozen=True)
class Index(Node):
    target: "Expr"
    index: "Expr"


@dataclass(frozen=True)
class If(Node):
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"


Expr = Union[Num, Str, Bool, Nil, Name, ListLit, Unary, Binary, Call, Lambda, Index, If]


@dataclass(frozen=True)
class Let(Node):
    name: str
    value: Expr


@dataclass(frozen=True)
class ExprStmt(Node):
    expr: Expr


Stmt = Union[Let, ExprStmt]


@dataclass(frozen=True)
class Program:
    statements: tuple[Stmt, ...]
    source: str = field(default="", compare=False, repr=False)


# =============================================================================
# PRINTER
# =============================================================================

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def quote(text: str) -> str:
    return '"' + "".join(_ESCAPES.get(ch, ch) for ch in text) + '"'


def unparse_expr(node: Expr) -> str:
    match node:
        case Num(value=value):
            return repr(value)
        case Str(value=value):
            return quote(value)
        case Bool(value=value):
            return "true" if value else "false"
        case Nil():
            return "nil"
        case Name(id=name):
            return name
        case ListLit(items=items):
            return "[" + ", ".join(unparse_expr(item) for item in items) + "]"
        case Unary(op="not", operand=operand):
            return f"(not {unparse_expr(operand)})"
        case Unary(op=op, operand=operand):
            return f"({op}{unparse_expr(operand)})"
        case Binary(op=op, left=left, right=right):
            return f"({unparse_expr(left)} {op} {unparse_expr(right)})"
        case Call(func=func, args=args):
            return f"{func}(" + ", ".join(unparse_expr(arg) for arg in args) + ")"
        case Lambda(params=params, body=body):
            return f"(|{', '.join(params)}| {unparse_expr(body)})"
        case Index(target=target, index=index):
            return f"{unparse_expr(target)}[{unparse_expr(index)}]"
        case If(cond=cond, then=then, orelse=orelse):
            return f"(if {unparse_expr(cond)} then {unparse_expr(then)} else {unparse_expr(orelse)})"
    raise TypeError(f"not an expression node: {node!r}")


def unparse(program: Program) -> str:
    lines = []
    for stmt in program.statements:
        if isinstance(stmt, Let):
            lines.append(f"let {stmt.name} = {unparse_expr(stmt.value)};")
        else:
            lines.append(f"{unparse_expr(stmt.expr)};")
    return "\n".join(lines)
