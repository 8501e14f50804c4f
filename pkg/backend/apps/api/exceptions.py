"""
API exception handling for Django Ninja.
"""

import logging

from django.conf import settings
from django.http import HttpRequest, HttpResponse
from ninja.errors import HttpError
from ninja.errors import ValidationError as NinjaValidationError

from apps.core.exceptions import SceneMemoryError
from apps.core.serialization import dumps

logger = logging.getLogger(__name__)

_HTTP_CODES = {400: "invalid_argument", 404: "not_found", 405: "method_not_allowed"}


def error_response(status: int, code: str, message: str, **details) -> HttpResponse:
    """``{"ok": false, "error": {"code", "message", ...}}`` as canonical JSON."""
    body = {"ok": False, "error": {**details, "code": code, "message": message}}
    return HttpResponse(dumps(body), status=status, content_type="application/json")


class APIExceptionHandler:
    """Centralized exception handling for API endpoints."""

    @staticmethod
    def handle_exception(request: HttpRequest, exc: Exception) -> HttpResponse:
        extra = {
            "request_id": getattr(request, "request_id", ""),
            "request_path": request.path,
            "request_method": request.method,
        }

        if isinstance(exc, SceneMemoryError):
            logger.info(f"API error {exc.code}: {exc.message}", extra=extra)
            return error_response(exc.status, exc.code, exc.message, **exc.details)

        if isinstance(exc, NinjaValidationError):
            fields = sorted({".".join(str(p) for p in err.get("loc", ())[1:]) for err in exc.errors})
            logger.info(f"API validation error on {', '.join(fields)}", extra=extra)
            return error_response(400, "invalid_argument", "request validation failed", fields=fields)

        if isinstance(exc, HttpError):
            return error_response(exc.status_code, _HTTP_CODES.get(exc.status_code, "http_error"), str(exc))

        logger.error(f"API Exception: {type(exc).__name__}: {exc}", extra=extra, exc_info=True)
        message = f"Internal server error: {exc}" if settings.DEBUG else "Internal server error"
        return error_response(500, "internal_error", message)
