"""
Typed views over the upper-case settings dicts.
"""

from typing import Any, ClassVar

from django.conf import settings
from pydantic import BaseModel, ConfigDict


class SettingsConfig(BaseModel):
    """Base for config objects backed by one settings dict.

    Keys in the dict are upper-case; fields are their lower-case names. Without
    configured Django settings the field defaults apply.
    """

    model_config = ConfigDict(frozen=True, extra="ignore")

    settings_name: ClassVar[str] = ""

    @classmethod
    def from_settings(cls, **overrides: Any):
        values: dict[str, Any] = {}
        if settings.configured:
            raw = getattr(settings, cls.settings_name, {}) or {}
            values = {key.lower(): value for key, value in raw.items()}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.model_validate(values)
