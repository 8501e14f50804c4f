"""
Shared behaviour for the scene-memory subcommands.
"""

from typing import Any

from django.core.management.base import BaseCommand

from apps.core.serialization import dumps_str
from apps.tools.registry import ToolPreset


class SceneCommand(BaseCommand):
    """Machine output goes to stdout as canonical JSON; logs go to stderr."""

    requires_system_checks: list[str] = []
    requires_migrations_checks = False

    @staticmethod
    def add_preset_argument(parser) -> None:
        parser.add_argument(
            "--tools",
            choices=[p.value for p in ToolPreset],
            default=None,
            help="tool preset (default from settings)",
        )

    def emit(self, value: Any) -> None:
        self.stdout.write(dumps_str(value))
