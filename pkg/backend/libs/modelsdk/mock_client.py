"""
Fixture model clients for development and testing.

They read sidecar JSON files shipped beside a scene bundle and never touch the
network, so ingest and agent runs are reproducible.
"""

import hashlib
import logging
from pathlib import Path
from typing import Any

import numpy as np
import orjson
from PIL import Image

from libs.modelsdk.contracts import CaptionRequest, ImageCropRequest, request_key
from libs.modelsdk.exceptions import ModelClientError

logger = logging.getLogger(__name__)

LABELS_SIDECAR = "labels.json"
TEXT_EMBEDDINGS_SIDECAR = "embeddings.json"
IMAGE_EMBEDDINGS_SIDECAR = "image_embeddings.json"
CAPTIONS_SIDECAR = "captions.json"

DEFAULT_DIMENSION = 16


def _read_sidecar(root: Path | None, name: str) -> dict[str, Any]:
    if root is None:
        return {}
    path = Path(root) / name
    if not path.is_file():
        return {}
    try:
        data = orjson.loads(path.read_bytes())
    except orjson.JSONDecodeError as e:
        raise ModelClientError(f"sidecar {path} is not valid JSON: {e}", retriable=False)
    if not isinstance(data, dict):
        raise ModelClientError(f"sidecar {path} must hold a JSON object", retriable=False)
    return data


def _unit(vector) -> list[float]:
    array = np.asarray(vector, dtype=np.float64)
    norm = float(np.linalg.norm(array))
    if norm == 0.0:
        raise ModelClientError("cannot normalize a zero vector", retriable=False)
    return (array / norm).tolist()


def hashed_embedding(text: str, dimension: int = DEFAULT_DIMENSION) -> list[float]:
    """Deterministic pseudo-random unit vector for text without a sidecar entry."""
    seed = int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")
    return _unit(np.random.default_rng(seed).normal(size=dimension))


class FixtureVisionClient:
    """Answers object enumeration from ``labels.json`` keyed by image ref."""

    def __init__(self, labels: dict[str, list[str]] | None = None):
        self.labels = labels or {}

    @classmethod
    def from_dir(cls, root: Path | str | None) -> "FixtureVisionClient":
        return cls(_read_sidecar(Path(root) if root else None, LABELS_SIDECAR))

    def enumerate_objects(self, image_ref: str, image_path: str) -> list[str]:
        for key in (image_ref, request_key({"image_ref": image_ref}), Path(image_ref).name):
            if key in self.labels:
                return list(self.labels[key])
        logger.debug(f"MOCK: no labels for {image_ref}")
        return []


class FixtureEmbeddingClient:
    """Text and crop embeddings from sidecars, with deterministic fallbacks.

    Texts missing from ``embeddings.json`` get a hashed vector. Crops missing
    from ``image_embeddings.json`` get the normalized mean colour of the crop,
    zero-padded to the text dimension, when the image exists. Otherwise they
    get the embedding of the crop's label.
    """

    def __init__(
        self,
        texts: dict[str, list[float]] | None = None,
        images: dict[str, list[float]] | None = None,
        dimension: int | None = None,
    ):
        self.texts = texts or {}
        self.images = images or {}
        if dimension is None:
            sample = next(iter(self.texts.values()), None)
            dimension = len(sample) if sample else DEFAULT_DIMENSION
        self.dimension = dimension

    @classmethod
    def from_dir(cls, root: Path | str | None) -> "FixtureEmbeddingClient":
        base = Path(root) if root else None
        return cls(_read_sidecar(base, TEXT_EMBEDDINGS_SIDECAR), _read_sidecar(base, IMAGE_EMBEDDINGS_SIDECAR))

    def _text(self, text: str) -> list[float]:
        for key in (text, request_key({"text": text})):
            if key in self.texts:
                return _unit(self.texts[key])
        return hashed_embedding(text, self.dimension)

    def embed_texts(self, texts: list[str]) -> list[list[float]]:
        return [self._text(text) for text in texts]

    def _image(self, request: ImageCropRequest) -> list[float]:
        for key in (request.natural_key(), request_key(request.model_dump())):
            if key in self.images:
                return _unit(self.images[key])
        path = Path(request.image_path)
        if self.dimension >= 3 and path.is_file():
            with Image.open(path) as image:
                pixels = np.asarray(image.convert("RGB").crop(request.box), dtype=np.float64)
            mean = pixels.reshape(-1, 3).mean(axis=0) if pixels.size else np.zeros(3)
            if mean.any():
                # colour in the leading components, same length as label vectors
                return _unit(np.pad(mean, (0, self.dimension - 3)))
        return self._text(request.label)

    def embed_images(self, requests: list[ImageCropRequest]) -> list[list[float]]:
        return [self._image(request) for request in requests]


class FixtureCaptioningClient:
    """Captions from ``captions.json`` keyed by sorted member labels."""

    def __init__(self, captions: dict[str, str] | None = None):
        self.captions = captions or {}

    @classmethod
    def from_dir(cls, root: Path | str | None) -> "FixtureCaptioningClient":
        return cls(_read_sidecar(Path(root) if root else None, CAPTIONS_SIDECAR))

    def caption(self, request: CaptionRequest) -> str:
        for key in (request.natural_key(), request_key({"crop_refs": request.crop_refs})):
            if key in self.captions:
                return str(self.captions[key])
        return " ".join(sorted(set(request.labels)))


class ScriptedModelClient:
    """Replays a recorded list of model action strings in order."""

    def __init__(self, actions: list[str]):
        self.actions = list(actions)
        self.calls: list[tuple[str, list[dict[str, str]]]] = []
        self._cursor = 0

    @classmethod
    def from_file(cls, path: Path | str) -> "ScriptedModelClient":
        try:
            actions = orjson.loads(Path(path).read_bytes())
        except (OSError, orjson.JSONDecodeError) as e:
            raise ModelClientError(f"cannot read scripted actions {path}: {e}", retriable=False)
        if not isinstance(actions, list) or not all(isinstance(a, str) for a in actions):
            raise ModelClientError(f"{path} must hold a JSON list of strings", retriable=False)
        return cls(actions)

    def complete(self, system_prompt: str, messages: list[dict[str, str]]) -> str:
        self.calls.append((system_prompt, [dict(m) for m in messages]))
        if self._cursor >= len(self.actions):
            raise ModelClientError("scripted actions exhausted", retriable=False)
        action = self.actions[self._cursor]
        self._cursor += 1
        return action
