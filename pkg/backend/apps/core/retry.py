"""
Bounded retries for model client calls.
"""

import logging
import time
from collections.abc import Callable
from typing import TypeVar

from apps.core.exceptions import ClientError
from libs.modelsdk.exceptions import ModelClientError

logger = logging.getLogger(__name__)

T = TypeVar("T")


def call_with_retries(fn: Callable[[], T], *, attempts: int, backoff_base: float, what: str) -> T:
    """Run ``fn`` retrying client failures with exponential backoff.

    Non-retriable client errors fail immediately; the last failure is raised
    as ``ClientError``.
    """
    last_exc: Exception | None = None
    for attempt in range(attempts):
        try:
            return fn()
        except ModelClientError as e:
            last_exc = e
            if not e.retriable:
                break
            logger.warning(f"{what} failed on attempt {attempt + 1}/{attempts}: {e}")
            if attempt + 1 < attempts:
                time.sleep(backoff_base * 2**attempt)
    raise ClientError(f"{what} failed: {last_exc}")
