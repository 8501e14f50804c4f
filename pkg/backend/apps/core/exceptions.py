"""
Domain error hierarchy for the scene memory engine.
"""

from typing import Any


class SceneMemoryError(Exception):
    """Base class for all domain errors.

    Every error carries a stable machine ``code`` (used on the tool wire and in
    HTTP error bodies) and the HTTP ``status`` the API layer maps it to.
    """

    code = "internal_error"
    status = 500
    retriable = False

    def __init__(self, message: str, *, code: str | None = None, details: dict[str, Any] | None = None):
        self.message = message
        if code is not None:
            self.code = code
        self.details = details or {}
        super().__init__(message)

    def to_error(self) -> dict[str, Any]:
        """Wire form: ``{"code", "message"}`` plus optional details."""
        error: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.details:
            error["details"] = self.details
        return error


class InvalidArgumentError(SceneMemoryError):
    code = "invalid_argument"
    status = 400


class InvalidArgumentsError(InvalidArgumentError):
    """Tool call arguments failed schema validation."""

    code = "invalid_arguments"

    def __init__(self, message: str, fields: list[str]):
        super().__init__(message, details={"fields": fields})
        self.fields = fields


class UnknownToolError(SceneMemoryError):
    code = "unknown_tool"
    status = 404


class NotFoundError(SceneMemoryError):
    code = "not_found"
    status = 404


class ConflictError(SceneMemoryError):
    code = "conflict"
    status = 409


class ParseError(SceneMemoryError):
    """Malformed input record. ``position`` names the file and line."""

    code = "parse_error"
    status = 400

    def __init__(self, message: str, *, position: str | None = None):
        self.position = position
        text = f"{position}: {message}" if position else message
        super().__init__(text, details={"position": position} if position else None)


class ValidationError(SceneMemoryError):
    code = "validation_error"
    status = 400


class EmptyGeometryError(SceneMemoryError):
    code = "empty_geometry"
    status = 400


class ClientError(SceneMemoryError):
    """A model/vision/embedding client call failed."""

    code = "client_error"
    status = 502
    retriable = True


class UnreachableError(SceneMemoryError):
    code = "unreachable"
    status = 422


class OutOfBoundsError(SceneMemoryError):
    code = "out_of_bounds"
    status = 422


class IoError(SceneMemoryError):
    code = "io_error"
    status = 500


class ServiceUnavailableError(SceneMemoryError):
    code = "unavailable"
    status = 503


class PipelineStageError(SceneMemoryError):
    """An ingest stage failed; wraps the cause with the stage name."""

    code = "stage_failed"
    status = 500

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"ingest stage '{stage}' failed: {cause}", details={"stage": stage})


def status_for(code: str) -> int:
    """HTTP status of the error class declaring ``code``; 500 when none does."""
    pending = [SceneMemoryError]
    while pending:
        cls = pending.pop()
        if cls.code == code:
            return cls.status
        pending.extend(cls.__subclasses__())
    return 500
