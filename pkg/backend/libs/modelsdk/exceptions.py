"""
Errors raised by model clients.
"""


class ModelClientError(Exception):
    """A client request failed (transport, HTTP status or malformed response)."""

    def __init__(self, message: str, *, retriable: bool = True):
        self.retriable = retriable
        super().__init__(message)
