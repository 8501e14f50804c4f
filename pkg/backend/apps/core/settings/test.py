"""
Test settings for the Scene Memory project.

This file contains settings specific to testing environment.
Optimized for speed and isolation.
"""

from .base import *  # noqa: F403,F401

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = True

SECRET_KEY = "test-secret-key-not-for-production"

# Allow all hosts in tests
ALLOWED_HOSTS = ["*"]

# Disable logging during tests
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "handlers": {
        "null": {
            "class": "logging.NullHandler",
        },
    },
    "root": {
        "handlers": ["null"],
    },
    "loggers": {
        "django": {
            "handlers": ["null"],
            "propagate": False,
        },
        "apps": {
            "handlers": ["null"],
            "propagate": False,
        },
        "libs": {
            "handlers": ["null"],
            "propagate": False,
        },
    },
}

# Disable Sentry in tests
SENTRY_DSN = ""

# No real backoff sleeps in tests
INVENTORY_CONFIG.update(  # noqa: F405
    {
        "BACKOFF_BASE": 0.0,
        "PARALLEL_JOBS": 1,
    }
)

CONNECTIVITY_CONFIG.update(  # noqa: F405
    {
        "BACKOFF_BASE": 0.0,
    }
)

AGENT_CONFIG.update(  # noqa: F405
    {
        "BACKOFF_BASE": 0.0,
    }
)

# Live clients are never reached from tests
MODEL_CLIENT_CONFIG.update(  # noqa: F405
    {
        "API_KEY": "",
        "BASE_URL": "",
        "MAX_RETRIES": 1,
        "TIMEOUT": 5,
    }
)

# Minimal middleware for tests
MIDDLEWARE = [
    "django.middleware.common.CommonMiddleware",
    "apps.core.middleware.RequestIDMiddleware",
    "apps.core.middleware.RequestLogMiddleware",
]

EVAL_CONFIG.update(  # noqa: F405
    {
        "PARALLEL_JOBS": 1,
    }
)
