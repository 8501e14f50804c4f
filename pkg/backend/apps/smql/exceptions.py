"""
Query language errors. All are client errors (HTTP 400) with a stable code.
"""

from typing import Any

from apps.core.exceptions import SceneMemoryError


class SmqlError(SceneMemoryError):
    status = 400

    def __init__(
        self,
        message: str,
        *,
        line: int | None = None,
        column: int | None = None,
        details: dict[str, Any] | None = None,
    ):
        self.line = line
        self.column = column
        self.reason = message
        details = dict(details or {})
        message = self.describe(message)
        if line is not None:
            details.update({"line": line, "column": column})
            message = f"line {line}, column {column}: {message}"
        super().__init__(message, details=details)

    def describe(self, reason: str) -> str:
        return reason

    def located(self, line: int, column: int) -> "SmqlError":
        """Same error pinned to a source position, unless it already has one."""
        if self.line is not None:
            return self
        details = {k: v for k, v in self.details.items() if k not in ("line", "column")}
        return type(self)(self.reason, line=line, column=column, details=details)


class SmqlSyntaxError(SmqlError):
    code = "syntax_error"

    def __init__(
        self,
        message: str,
        *,
        line: int | None = None,
        column: int | None = None,
        expected: list[str] | None = None,
        details: dict[str, Any] | None = None,
    ):
        details = dict(details or {})
        if expected is not None:
            details["expected"] = sorted(set(expected))
        self.expected = details.get("expected", [])
        super().__init__(message, line=line, column=column, details=details)

    def describe(self, reason: str) -> str:
        if not self.expected:
            return reason
        return f"{reason} (expected {', '.join(self.expected)})"


class ResourceLimitError(SmqlError):
    code = "resource_limit"

    def __init__(self, limit: str, message: str, **kwargs):
        details = dict(kwargs.pop("details", None) or {})
        details["limit"] = limit
        self.limit = limit
        super().__init__(message, details=details, **kwargs)

    def located(self, line: int, column: int) -> "SmqlError":
        return self


class SmqlTypeError(SmqlError):
    code = "type_error"


class UnknownFunctionError(SmqlError):
    code = "unknown_function"
