"""
Lexer and recursive-descent parser for scene query programs.

    program   = stmt*
    stmt      = "let" IDENT "=" expr ";" | expr ";"
    expr      = "if" expr "then" expr "else" expr | "|" params "|" expr | or
    or        = and ("or" and)*
    and       = compare ("and" compare)*
    compare   = sum (("==" | "!=" | "<" | "<=" | ">" | ">=") sum)*
    sum       = product (("+" | "-") product)*
    product   = unary (("*" | "/") unary)*
    unary     = ("-" | "not") unary | postfix
    postfix   = atom ("[" expr "]")*
    atom      = NUMBER | STRING | "true" | "false" | "nil" | IDENT | IDENT "(" args ")"
              | "[" args "]" | "(" expr ")" | if-expr | lambda
"""

import math
import re
from dataclasses import dataclass

from . import ast
from .exceptions import ResourceLimitError, SmqlSyntaxError

KEYWORDS = frozenset({"let", "if", "then", "else", "and", "or", "not", "true", "false", "nil"})

MAX_NESTING = 50

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
    |(?P<comment>\#[^\n]*)
    |(?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
    |(?P<string>"(?:[^"\\\n]|\\.)*")
    |(?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    |(?P<op><=|>=|==|!=|[-+*/<>=;,()\[\]|])
    """,
    re.VERBOSE,
)
_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}


@dataclass(frozen=True)
class Token:
    kind: str  # number, string, ident, keyword, op, eof
    text: str
    line: int
    column: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def _unescape(body: str, line: int, column: int) -> str:
    out = []
    chars = iter(enumerate(body))
    for i, ch in chars:
        if ch != "\\":
            out.append(ch)
            continue
        _, nxt = next(chars)
        if nxt not in _UNESCAPES:
            raise SmqlSyntaxError(f"unknown escape '\\{nxt}'", line=line, column=column + i + 1)
        out.append(_UNESCAPES[nxt])
    return "".join(out)


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        column = pos - line_start + 1
        if match is None:
            if source[pos] == '"':
                raise SmqlSyntaxError("unterminated string", line=line, column=column)
            raise SmqlSyntaxError(f"unexpected character {source[pos]!r}", line=line, column=column)
        kind = match.lastgroup
        text = match.group()
        if kind == "ident" and text in KEYWORDS:
            kind = "keyword"
        if kind == "string":
            tokens.append(Token(kind, _unescape(text[1:-1], line, column), line, column))
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, line, column))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = match.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _number(token: Token) -> int | float:
    text = token.text
    value: int | float = int(text) if text.isdigit() and len(text) <= 15 else float(text)
    if not math.isfinite(value):
        raise SmqlSyntaxError(f"number literal out of range: {text}", line=token.line, column=token.column)
    return value


_COMPARE_OPS = ("==", "!=", "<", "<=", ">", ">=")


class Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.pos = 0
        self.depth = 0

    # ----- token helpers -----

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "eof":
            self.pos += 1
        return token

    def _check(self, text: str) -> bool:
        token = self.current
        return token.kind in ("op", "keyword") and token.text == text

    def _error(self, expected: list[str], message: str | None = None) -> SmqlSyntaxError:
        token = self.current
        return SmqlSyntaxError(
            message or f"unexpected {token.describe()}",
            line=token.line,
            column=token.column,
            expected=expected,
        )

    def _expect(self, text: str) -> Token:
        if not self._check(text):
            raise self._error([f"'{text}'"])
        return self._advance()

    def _ident(self) -> Token:
        if self.current.kind != "ident":
            raise self._error(["identifier"])
        return self._advance()

    def _enter(self) -> None:
        self.depth += 1
        if self.depth > MAX_NESTING:
            raise ResourceLimitError("nesting", f"program nesting deeper than {MAX_NESTING}")

    # ----- grammar -----

    def parse(self) -> ast.Program:
        statements = []
        while self.current.kind != "eof":
            statements.append(self._statement())
        return ast.Program(tuple(statements), source=self.source)

    def _statement(self) -> ast.Stmt:
        start = self.current
        if self._check("let"):
            self._advance()
            name = self._ident().text
            self._expect("=")
            value = self._expr()
            self._end_statement()
            return ast.Let(name, value, line=start.line, column=start.column)
        expr = self._expr()
        self._end_statement()
        return ast.ExprStmt(expr, line=start.line, column=start.column)

    def _end_statement(self) -> None:
        if not self._check(";"):
            raise self._error(["';'", "operator"])
        self._advance()

    def _expr(self) -> ast.Expr:
        self._enter()
        try:
            if self._check("if"):
                return self._if()
            if self._check("|"):
                return self._lambda()
            return self._binary(0)
        finally:
            self.depth -= 1

    def _if(self) -> ast.If:
        start = self._advance()
        cond = self._expr()
        self._expect("then")
        then = self._expr()
        self._expect("else")
        orelse = self._expr()
        return ast.If(cond, then, orelse, line=start.line, column=start.column)

    def _lambda(self) -> ast.Lambda:
        start = self._advance()
        params: list[str] = []
        if not self._check("|"):
            params.append(self._ident().text)
            while self._check(","):
                self._advance()
                params.append(self._ident().text)
        if len(set(params)) != len(params):
            raise SmqlSyntaxError("duplicate lambda parameter", line=start.line, column=start.column)
        self._expect("|")
        body = self._expr()
        return ast.Lambda(tuple(params), body, line=start.line, column=start.column)

    # precedence levels, lowest first
    _LEVELS: tuple[tuple[str, ...], ...] = (("or",), ("and",), _COMPARE_OPS, ("+", "-"), ("*", "/"))

    def _binary(self, level: int) -> ast.Expr:
        if level == len(self._LEVELS):
            return self._unary()
        left = self._binary(level + 1)
        chained = 0
        try:
            while self.current.kind in ("op", "keyword") and self.current.text in self._LEVELS[level]:
                # left-nested chains count towards the nesting limit
                self._enter()
                chained += 1
                op = self._advance()
                right = self._binary(level + 1)
                left = ast.Binary(op.text, left, right, line=op.line, column=op.column)
        finally:
            self.depth -= chained
        return left

    def _unary(self) -> ast.Expr:
        if self._check("-") or self._check("not"):
            op = self._advance()
            self._enter()
            try:
                operand = self._unary()
            finally:
                self.depth -= 1
            return ast.Unary(op.text, operand, line=op.line, column=op.column)
        return self._postfix()

    def _postfix(self) -> ast.Expr:
        node = self._atom()
        while self._check("["):
            bracket = self._advance()
            index = self._expr()
            self._expect("]")
            node = ast.Index(node, index, line=bracket.line, column=bracket.column)
        return node

    def _args(self, closer: str) -> tuple[ast.Expr, ...]:
        args: list[ast.Expr] = []
        if not self._check(closer):
            args.append(self._expr())
            while self._check(","):
                self._advance()
                args.append(self._expr())
        if not self._check(closer):
            raise self._error([f"'{closer}'", "','"])
        self._advance()
        return tuple(args)

    def _atom(self) -> ast.Expr:
        token = self.current
        where = {"line": token.line, "column": token.column}
        if token.kind == "number":
            self._advance()
            return ast.Num(_number(token), **where)
        if token.kind == "string":
            self._advance()
            return ast.Str(token.text, **where)
        if token.kind == "ident":
            self._advance()
            if self._check("("):
                self._advance()
                return ast.Call(token.text, self._args(")"), **where)
            return ast.Name(token.text, **where)
        if token.kind == "keyword" and token.text in ("true", "false"):
            self._advance()
            return ast.Bool(token.text == "true", **where)
        if self._check("nil"):
            self._advance()
            return ast.Nil(**where)
        if self._check("["):
            self._advance()
            return ast.ListLit(self._args("]"), **where)
        if self._check("("):
            self._advance()
            inner = self._expr()
            self._expect(")")
            return inner
        if self._check("if") or self._check("|"):
            return self._expr()
        raise self._error(["expression"])


def parse(source: str) -> ast.Program:
    return Parser(source).parse()
