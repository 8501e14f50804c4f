# Core app - settings, CLI commands and shared infrastructure for Scene Memory
