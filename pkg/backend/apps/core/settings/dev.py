"""
Development settings for the Scene Memory project.

This file contains settings specific to development environment.
"""

from .base import *  # noqa: F403,F401

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = True

# Allow all hosts in development
ALLOWED_HOSTS = ["*"]

SECRET_KEY = env("SECRET_KEY", default="dev-secret-key-not-for-production")  # noqa: F405

# Verbose pipeline logging in development
LOGGING["loggers"]["apps"]["level"] = env("LOG_LEVEL", default="INFO")  # noqa: F405
