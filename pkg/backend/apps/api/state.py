"""
Per-process server state: the loaded scene memory, its tool registry and
the optional model client behind ``POST /query``.
"""

import logging
import threading
from typing import Any, ClassVar

from pydantic import Field

from apps.core.clients import ClientService
from apps.core.config import SettingsConfig
from apps.core.exceptions import ServiceUnavailableError
from apps.memory.services import SceneMemory
from apps.smql.schemas import SmqlLimits
from apps.tools.navigation import NavigationConfig
from apps.tools.registry import ToolPreset, ToolRegistry, build_registry
from libs.modelsdk.contracts import ModelClient

logger = logging.getLogger(__name__)


class ServerConfig(SettingsConfig):
    settings_name = "SERVER_CONFIG"

    bind: str = "127.0.0.1:8000"
    threads: int = Field(default=8, ge=1)
    timeout: int = Field(default=120, ge=1)
    memory_dir: str = ""
    kv_stores: list[dict[str, Any]] = Field(default_factory=list)
    tool_preset: ToolPreset = ToolPreset.FULL
    scripted: str = ""


class ServerState:
    """One memory per process. Loaded once, before the first request."""

    _current: ClassVar["ServerState | None"] = None
    _lock: ClassVar[threading.Lock] = threading.Lock()

    def __init__(self, memory: SceneMemory, registry: ToolRegistry, client: ModelClient | None = None):
        self.memory = memory
        self.registry = registry
        self.client = client

    @classmethod
    def load(cls, config: ServerConfig | None = None) -> "ServerState":
        config = config or ServerConfig.from_settings()
        if not config.memory_dir:
            raise ServiceUnavailableError("no scene memory configured; set SERVER_CONFIG MEMORY_DIR")
        memory = SceneMemory.load(config.memory_dir)
        registry = build_registry(
            memory,
            config.tool_preset,
            kv_stores=config.kv_stores,
            nav_config=NavigationConfig.from_settings(),
            limits=SmqlLimits.from_settings(),
        )
        client = ClientService.model_client(config.scripted or None)
        logger.info(
            f"Serving {len(memory)} components from {config.memory_dir} with {len(registry)} tools",
            extra={"query_enabled": client is not None},
        )
        return cls(memory, registry, client)

    @classmethod
    def install(cls, state: "ServerState | None") -> "ServerState | None":
        with cls._lock:
            cls._current = state
        return state

    @classmethod
    def current(cls) -> "ServerState":
        if cls._current is None:
            with cls._lock:
                if cls._current is None:
                    cls._current = cls.load()
        return cls._current
