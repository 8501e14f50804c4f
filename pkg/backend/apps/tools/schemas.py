"""
Tool wire types: specs, calls and results.
"""

from typing import Any, Literal

from ninja import Schema
from pydantic import ConfigDict, Field

from apps.core.exceptions import SceneMemoryError

ParamType = Literal["integer", "number", "string", "boolean", "object"]


class ParamSpec(Schema):
    model_config = ConfigDict(frozen=True)

    type: ParamType
    required: bool = True
    description: str = ""


class ToolSpec(Schema):
    """Name, description and parameter schema of one registered tool."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1, pattern=r"^[a-z][a-z0-9_]*$")
    description: str
    parameters: dict[str, ParamSpec] = Field(default_factory=dict)

    def signature(self) -> str:
        params = ", ".join(
            f"{name}: {param.type}" + ("" if param.required else "?") for name, param in self.parameters.items()
        )
        return f"{self.name}({params})"


class ToolCall(Schema):
    """``{"name", "arguments", "call_id"}`` on the wire."""

    model_config = ConfigDict(extra="forbid")

    name: str
    arguments: dict[str, Any] = Field(default_factory=dict)
    call_id: str | None = None


class ToolResult(Schema):
    call_id: str | None = None
    ok: bool
    payload: Any = None
    error: dict[str, Any] | None = None

    @classmethod
    def success(cls, call_id: str | None, payload: Any) -> "ToolResult":
        return cls(call_id=call_id, ok=True, payload=payload)

    @classmethod
    def failure(cls, call_id: str | None, error: SceneMemoryError) -> "ToolResult":
        """Error body is ``{"code", "message"}`` plus the error details (``fields``, ``line``, ...)."""
        body: dict[str, Any] = {**error.details, "code": error.code, "message": error.message}
        return cls(call_id=call_id, ok=False, error=body)

    @property
    def error_code(self) -> str | None:
        return self.error["code"] if self.error else None

    def to_wire(self) -> dict[str, Any]:
        """Exactly one of ``payload`` / ``error``; ``call_id`` only when set."""
        wire: dict[str, Any] = {"ok": self.ok}
        if self.call_id is not None:
            wire["call_id"] = self.call_id
        if self.ok:
            wire["payload"] = self.payload
        else:
            wire["error"] = self.error
        return wire
