"""
Request types and client protocols shared by live and fixture clients.
"""

import hashlib
from typing import Any, Protocol

import orjson
from pydantic import BaseModel, ConfigDict

CAPTION_PROMPT = (
    "These images show different views of the same object. "
    "Provide a concise caption naming the object and its salient attributes."
)

INVENTORY_PROMPT = (
    "Identify all tangible objects in this image. "
    "Reply with a JSON array of short lowercase noun phrases."
)


class ImageCropRequest(BaseModel):
    """A masked best-view crop to embed."""

    model_config = ConfigDict(frozen=True)

    image_ref: str
    image_path: str
    box: tuple[int, int, int, int]  # u0, v0, u1, v1 (exclusive)
    label: str

    def natural_key(self) -> str:
        u0, v0, u1, v1 = self.box
        return f"{self.image_ref}#{u0},{v0},{u1},{v1}"


class CaptionRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    crop_refs: list[str]
    image_paths: list[str]
    labels: list[str]

    def natural_key(self) -> str:
        return "|".join(sorted(set(self.labels)))


def request_key(payload: Any) -> str:
    """Content hash used to key fixture sidecar entries."""
    return hashlib.sha256(orjson.dumps(payload, option=orjson.OPT_SORT_KEYS)).hexdigest()[:16]


class VisionLanguageClient(Protocol):
    def enumerate_objects(self, image_ref: str, image_path: str) -> list[str]: ...


class EmbeddingClient(Protocol):
    def embed_texts(self, texts: list[str]) -> list[list[float]]: ...

    def embed_images(self, requests: list[ImageCropRequest]) -> list[list[float]]: ...


class CaptioningClient(Protocol):
    def caption(self, request: CaptionRequest) -> str: ...


class ModelClient(Protocol):
    """``(system prompt, message history) -> model action text``."""

    def complete(self, system_prompt: str, messages: list[dict[str, str]]) -> str: ...
