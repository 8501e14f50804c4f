"""
Sandbox limits for query evaluation.
"""

from pydantic import Field

from apps.core.config import SettingsConfig


class SmqlLimits(SettingsConfig):
    settings_name = "SMQL_LIMITS"

    max_steps: int = Field(default=100_000, gt=0)
    max_values_bytes: int = Field(default=1024 * 1024, gt=0)
    max_list_len: int = Field(default=100_000, gt=0)
    max_call_depth: int = Field(default=64, gt=0)
    max_source_bytes: int = Field(default=64 * 1024, gt=0)
