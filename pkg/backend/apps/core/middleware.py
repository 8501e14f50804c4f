"""
Core middleware for the Scene Memory tool server.
"""

import logging
import time
import uuid

from django.http import HttpRequest

logger = logging.getLogger(__name__)


class RequestIDMiddleware:
    """Middleware for adding unique request ID to all requests."""

    def __init__(self, get_response=None):
        self.get_response = get_response

    def __call__(self, request: HttpRequest):
        """Add request ID to request."""
        # Honour an upstream id so agent processes can correlate their calls
        request_id = request.headers.get("X-Request-ID") or str(uuid.uuid4())
        request.request_id = request_id

        response = self.get_response(request) if self.get_response else None
        if response:
            response["X-Request-ID"] = request_id

        return response


class RequestLogMiddleware:
    """Middleware logging one structured line per handled request."""

    skip_paths = ("/healthz", "/metrics")

    def __init__(self, get_response=None):
        self.get_response = get_response

    def __call__(self, request: HttpRequest):
        if request.path in self.skip_paths:
            return self.get_response(request) if self.get_response else None

        started = time.perf_counter()
        response = self.get_response(request) if self.get_response else None
        self._log_request(request, response, time.perf_counter() - started)
        return response

    def _log_request(self, request: HttpRequest, response, elapsed: float):
        """Log the request outcome to the structured logger."""
        try:
            log_data = {
                "request_id": getattr(request, "request_id", ""),
                "method": request.method,
                "path": request.path,
                "status_code": response.status_code if response else None,
                "duration_ms": round(elapsed * 1000, 3),
                "ip_address": self._get_client_ip(request),
            }
            logger.info("Request handled", extra=log_data)
        except Exception as e:
            logger.error(f"Request logging failed: {e}", exc_info=True)

    def _get_client_ip(self, request: HttpRequest) -> str:
        """Get client IP address from request."""
        x_forwarded_for = request.META.get("HTTP_X_FORWARDED_FOR")
        if x_forwarded_for:
            return x_forwarded_for.split(",")[0].strip()
        return request.META.get("REMOTE_ADDR", "unknown")
