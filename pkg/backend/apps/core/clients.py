"""
Model client selection: live HTTP clients when credentials are configured,
fixture clients otherwise.
"""

import logging
from pathlib import Path
from typing import NamedTuple

from pydantic import Field

from apps.core.config import SettingsConfig
from libs.modelsdk.client import HttpCaptioningClient, HttpEmbeddingClient, HttpModelClient, HttpVisionClient
from libs.modelsdk.contracts import CaptioningClient, EmbeddingClient, ModelClient, VisionLanguageClient
from libs.modelsdk.mock_client import (
    FixtureCaptioningClient,
    FixtureEmbeddingClient,
    FixtureVisionClient,
    ScriptedModelClient,
)

logger = logging.getLogger(__name__)


class ModelClientConfig(SettingsConfig):
    settings_name = "MODEL_CLIENT_CONFIG"

    api_key: str = ""
    base_url: str = ""
    model: str = ""
    embedding_model: str = ""
    timeout: float = Field(default=60.0, gt=0)
    max_retries: int = Field(default=3, ge=1)
    temperature: float = 0.0

    @property
    def live(self) -> bool:
        return bool(self.base_url and self.model)


class IngestClients(NamedTuple):
    vision: VisionLanguageClient
    embedder: EmbeddingClient
    captioner: CaptioningClient


class ClientService:
    @staticmethod
    def _http_kwargs(config: ModelClientConfig) -> dict:
        return {
            "base_url": config.base_url,
            "api_key": config.api_key,
            "timeout": config.timeout,
            "max_retries": config.max_retries,
            "temperature": config.temperature,
        }

    @classmethod
    def model_client(
        cls, scripted: Path | str | None = None, config: ModelClientConfig | None = None
    ) -> ModelClient | None:
        """Scripted replay when a script is given, else the live client, else ``None``."""
        if scripted:
            logger.info(f"Using scripted model actions from {scripted}")
            return ScriptedModelClient.from_file(scripted)
        config = config or ModelClientConfig.from_settings()
        if not config.live:
            return None
        return HttpModelClient(model=config.model, **cls._http_kwargs(config))

    @classmethod
    def ingest_clients(
        cls,
        bundle_dir: Path | str,
        *,
        fixtures: bool | None = None,
        config: ModelClientConfig | None = None,
    ) -> IngestClients:
        """Clients for one ingest run.

        ``fixtures=None`` picks the live stack when credentials are configured
        and the bundle's sidecar fixtures otherwise.
        """
        config = config or ModelClientConfig.from_settings()
        use_fixtures = (not config.live) if fixtures is None else fixtures
        if use_fixtures:
            logger.info(f"Using fixture model clients from {bundle_dir}")
            return IngestClients(
                vision=FixtureVisionClient.from_dir(bundle_dir),
                embedder=FixtureEmbeddingClient.from_dir(bundle_dir),
                captioner=FixtureCaptioningClient.from_dir(bundle_dir),
            )
        kwargs = cls._http_kwargs(config)
        return IngestClients(
            vision=HttpVisionClient(model=config.model, **kwargs),
            embedder=HttpEmbeddingClient(model=config.embedding_model or config.model, **kwargs),
            captioner=HttpCaptioningClient(model=config.model, **kwargs),
        )
