"""
Base Django settings for the Scene Memory project.

This file contains common settings for all environments.
For environment-specific settings, see dev.py, prod.py, and test.py.
"""

from pathlib import Path

import environ

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent.parent

# Environment variables
env = environ.Env(
    # Set casting and default values
    DEBUG=(bool, False),
    SECRET_KEY=(str, ""),
    ALLOWED_HOSTS=(list, ["localhost", "127.0.0.1"]),
    SENTRY_DSN=(str, ""),
    LOG_LEVEL=(str, "INFO"),
    LOG_FORMAT=(str, "verbose"),
    MODEL_API_KEY=(str, ""),
    MODEL_BASE_URL=(str, ""),
    MODEL_NAME=(str, ""),
    EMBEDDING_MODEL_NAME=(str, ""),
)

# Read .env file if it exists
environ.Env.read_env(BASE_DIR / ".env")

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = env("SECRET_KEY")

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = env("DEBUG")

ALLOWED_HOSTS = env("ALLOWED_HOSTS")

# Application definition
DJANGO_APPS = [
    "django.contrib.contenttypes",
]

THIRD_PARTY_APPS = [
    "ninja",
]

LOCAL_APPS = [
    "apps.core",
    "apps.api",
]

INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + LOCAL_APPS

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.middleware.common.CommonMiddleware",
    # Custom middleware
    "apps.core.middleware.RequestIDMiddleware",
    "apps.core.middleware.RequestLogMiddleware",
]

ROOT_URLCONF = "apps.api.urls"

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [
                "django.template.context_processors.request",
            ],
        },
    },
]

WSGI_APPLICATION = "apps.core.wsgi.application"

# The scene memory is an embedded file store; no relational database is used.
DATABASES: dict = {}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Internationalization
LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

# Request bodies carry tool calls and questions only
DATA_UPLOAD_MAX_MEMORY_SIZE = 2 * 1024 * 1024  # 2 MB

# Logging Configuration
LOG_LEVEL = env("LOG_LEVEL")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {name} {process:d} {thread:d} {message}",
            "style": "{",
        },
        "json": {
            "()": "pythonjsonlogger.jsonlogger.JsonFormatter",
            "format": "%(asctime)s %(name)s %(levelname)s %(message)s %(funcName)s %(lineno)d",
        },
    },
    "handlers": {
        # StreamHandler defaults to stderr, keeping stdout free for CLI output
        "console": {
            "level": LOG_LEVEL,
            "class": "logging.StreamHandler",
            "formatter": env("LOG_FORMAT"),
        },
    },
    "root": {
        "level": "WARNING",
        "handlers": ["console"],
    },
    "loggers": {
        "django": {
            "handlers": ["console"],
            "level": "WARNING",
            "propagate": False,
        },
        "apps": {
            "handlers": ["console"],
            "level": LOG_LEVEL,
            "propagate": False,
        },
        "libs": {
            "handlers": ["console"],
            "level": LOG_LEVEL,
            "propagate": False,
        },
        "httpx": {
            "handlers": ["console"],
            "level": "WARNING",
            "propagate": False,
        },
    },
}

# Object inventory (label enumeration, normalization, frame runs)
INVENTORY_CONFIG = {
    "CLUSTER_THRESHOLD": 0.05,  # cosine distance
    "MAX_GAP": 3,  # frames
    "MIN_RUN": 5,  # frames
    "CLIENT_ATTEMPTS": 3,
    "BACKOFF_BASE": 0.5,  # seconds, doubled per attempt
    "PARALLEL_JOBS": 4,
}

# 2D-to-3D association
ASSOCIATION_CONFIG = {
    "OUTLIER_EPS": 0.5,  # meters
    "OUTLIER_MIN_SAMPLES": 5,
}

# Component graph construction
CONNECTIVITY_CONFIG = {
    "VOXEL_CELL": 0.5,  # meters
    "TAU": 0.25,  # Jaccard threshold, calibration knob
    "GUARD_COS_DIST": 0.8,
    "CLEAN_EPS": 0.1,  # meters
    "CLEAN_MIN_SAMPLES": 5,
    "MIN_POINTS": 20,
    "TOP_K_VIEWS": 3,
    "CLIENT_ATTEMPTS": 3,
    "BACKOFF_BASE": 0.5,  # seconds, doubled per attempt
}

# Scene memory indexes
MEMORY_CONFIG = {
    "BM25_K1": 1.2,
    "BM25_B": 0.75,
    "GRID_CELL": 1.0,  # meters
    "LINEAR_SCAN_BELOW": 64,  # components
}

# Floor-plane navigation
NAVIGATION_CONFIG = {
    "CELL": 0.1,  # meters
    "FLOOR_PERCENTILE": 5.0,
    "BAND_LOW": 0.05,  # meters above floor
    "BAND_HIGH": 1.8,  # meters above floor
    "INFLATION": 0.2,  # meters
}

# Scene query language sandbox
SMQL_LIMITS = {
    "MAX_STEPS": 100_000,
    "MAX_VALUES_BYTES": 1024 * 1024,
    "MAX_LIST_LEN": 100_000,
    "MAX_CALL_DEPTH": 64,
    "MAX_SOURCE_BYTES": 64 * 1024,
}

# Agent loop
AGENT_CONFIG = {
    "MAX_STEPS": 20,
    "RESULT_TRUNCATE_BYTES": 8 * 1024,
    "CLIENT_ATTEMPTS": 3,
    "BACKOFF_BASE": 1.0,  # seconds, doubled per attempt
    "TOOL_PRESET": "full",
}

# Live model clients (credentials only from the environment)
MODEL_CLIENT_CONFIG = {
    "API_KEY": env("MODEL_API_KEY"),
    "BASE_URL": env("MODEL_BASE_URL"),
    "MODEL": env("MODEL_NAME"),
    "EMBEDDING_MODEL": env("EMBEDDING_MODEL_NAME"),
    "TIMEOUT": 60,  # seconds
    "MAX_RETRIES": 3,
    "TEMPERATURE": 0.0,
}

# Evaluation harness
EVAL_CONFIG = {
    "PARALLEL_JOBS": 4,
    "TOOL_PRESET": "full",
}

# HTTP tool server
SERVER_CONFIG = {
    "BIND": "127.0.0.1:8000",
    "THREADS": 8,
    "TIMEOUT": 120,  # seconds
    "MEMORY_DIR": env("SCENE_MEMORY_DIR", default=""),
    "KV_STORES": [],  # list of {"NAME", "PATH", "DESCRIPTION"}
    "TOOL_PRESET": "full",
    "SCRIPTED": env("SCENE_MEMORY_SCRIPTED", default=""),  # scripted model actions for POST /query
}

# Sentry Configuration
SENTRY_DSN = env("SENTRY_DSN")
