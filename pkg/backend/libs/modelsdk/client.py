"""
Live model clients speaking an OpenAI-compatible HTTP API via httpx.
"""

import base64
import io
import logging
import time
from typing import Any

import httpx
import orjson
from PIL import Image

from libs.modelsdk.contracts import CAPTION_PROMPT, INVENTORY_PROMPT, CaptionRequest, ImageCropRequest
from libs.modelsdk.exceptions import ModelClientError

logger = logging.getLogger(__name__)


def _image_data_url(path: str, box: tuple[int, int, int, int] | None = None) -> str:
    try:
        with Image.open(path) as image:
            image = image.convert("RGB")
            if box is not None:
                image = image.crop(box)
            buffer = io.BytesIO()
            image.save(buffer, format="PNG")
    except OSError as e:
        raise ModelClientError(f"cannot read image {path}: {e}", retriable=False)
    return "data:image/png;base64," + base64.b64encode(buffer.getvalue()).decode("ascii")


def tool_calls_to_blocks(tool_calls: list[dict[str, Any]]) -> str:
    """Render vendor ``tool_calls`` as fenced ```tool blocks the agent parser understands."""
    blocks = []
    for call in tool_calls:
        function = call.get("function") or {}
        raw_args = function.get("arguments") or "{}"
        try:
            args = orjson.loads(raw_args) if isinstance(raw_args, str) else raw_args
        except orjson.JSONDecodeError:
            args = {"_raw": raw_args}
        body = {"name": function.get("name"), "arguments": args}
        if call.get("id"):
            body["call_id"] = call["id"]
        blocks.append("```tool\n" + orjson.dumps(body).decode("utf-8") + "\n```")
    return "\n".join(blocks)


class HttpModelClient:
    """
    Chat-completions client with bounded retries on transient failures.
    """

    def __init__(
        self,
        base_url: str,
        api_key: str,
        model: str,
        *,
        timeout: float = 60.0,
        max_retries: int = 3,
        backoff_base: float = 1.0,
        temperature: float = 0.0,
        transport: httpx.BaseTransport | None = None,
    ):
        if not base_url or not model:
            raise ModelClientError("base_url and model are required for a live client", retriable=False)
        self.model = model
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.temperature = temperature
        self._http = httpx.Client(
            base_url=base_url.rstrip("/"),
            headers={"Authorization": f"Bearer {api_key}"} if api_key else {},
            timeout=timeout,
            transport=transport,
        )

    def close(self) -> None:
        self._http.close()

    def _post(self, path: str, payload: dict[str, Any]) -> dict[str, Any]:
        last_exc: Exception | None = None
        for attempt in range(self.max_retries):
            try:
                response = self._http.post(path, content=orjson.dumps(payload), headers={"Content-Type": "application/json"})
            except httpx.TransportError as e:
                last_exc = e
                logger.warning(f"Model API transport error on attempt {attempt + 1}: {e}")
                time.sleep(self.backoff_base * 2**attempt)
                continue
            if response.status_code >= 500 or response.status_code == 429:
                last_exc = ModelClientError(f"model API error {response.status_code}")
                logger.warning(f"Model API returned {response.status_code} on attempt {attempt + 1}")
                time.sleep(self.backoff_base * 2**attempt)
                continue
            if response.status_code >= 400:
                raise ModelClientError(
                    f"model API error {response.status_code}: {response.text[:200]}", retriable=False
                )
            try:
                return orjson.loads(response.content)
            except orjson.JSONDecodeError as e:
                raise ModelClientError(f"model API returned invalid JSON: {e}", retriable=False)
        raise ModelClientError(f"model API failed after {self.max_retries} attempts: {last_exc}", retriable=False)

    def _chat(self, messages: list[dict[str, Any]]) -> dict[str, Any]:
        body = self._post(
            "/chat/completions",
            {"model": self.model, "messages": messages, "temperature": self.temperature},
        )
        try:
            return body["choices"][0]["message"]
        except (KeyError, IndexError, TypeError):
            raise ModelClientError("model API response has no choices", retriable=False)

    def complete(self, system_prompt: str, messages: list[dict[str, str]]) -> str:
        wire = [{"role": "system", "content": system_prompt}]
        for message in messages:
            # tool results go back as user turns; the agent owns the tool protocol
            role = "assistant" if message["role"] == "assistant" else "user"
            wire.append({"role": role, "content": message["content"]})
        reply = self._chat(wire)
        text = reply.get("content") or ""
        if reply.get("tool_calls"):
            text = (text + "\n" + tool_calls_to_blocks(reply["tool_calls"])).strip()
        return text


class HttpVisionClient(HttpModelClient):
    def enumerate_objects(self, image_ref: str, image_path: str) -> list[str]:
        reply = self._chat(
            [
                {
                    "role": "user",
                    "content": [
                        {"type": "text", "text": INVENTORY_PROMPT},
                        {"type": "image_url", "image_url": {"url": _image_data_url(image_path)}},
                    ],
                }
            ]
        )
        text = (reply.get("content") or "").strip()
        start, end = text.find("["), text.rfind("]")
        if start < 0 or end < start:
            raise ModelClientError(f"unparseable object list for {image_ref}", retriable=False)
        try:
            labels = orjson.loads(text[start : end + 1])
        except orjson.JSONDecodeError as e:
            raise ModelClientError(f"unparseable object list for {image_ref}: {e}", retriable=False)
        return [str(label) for label in labels if isinstance(label, str)]


class HttpCaptioningClient(HttpModelClient):
    def caption(self, request: CaptionRequest) -> str:
        content: list[dict[str, Any]] = [{"type": "text", "text": CAPTION_PROMPT}]
        content += [
            {"type": "image_url", "image_url": {"url": _image_data_url(path)}} for path in request.image_paths
        ]
        reply = self._chat([{"role": "user", "content": content}])
        return (reply.get("content") or "").strip()


class HttpEmbeddingClient(HttpModelClient):
    def _embed(self, inputs: list[Any]) -> list[list[float]]:
        if not inputs:
            return []
        body = self._post("/embeddings", {"model": self.model, "input": inputs})
        try:
            rows = sorted(body["data"], key=lambda row: row["index"])
            vectors = [list(map(float, row["embedding"])) for row in rows]
        except (KeyError, TypeError, ValueError):
            raise ModelClientError("embedding response is malformed", retriable=False)
        if len(vectors) != len(inputs):
            raise ModelClientError(f"expected {len(inputs)} embeddings, got {len(vectors)}", retriable=False)
        return vectors

    def embed_texts(self, texts: list[str]) -> list[list[float]]:
        return self._embed(list(texts))

    def embed_images(self, requests: list[ImageCropRequest]) -> list[list[float]]:
        return self._embed([{"image": _image_data_url(r.image_path, r.box)} for r in requests])
