"""
Tool server API: tool dispatch, component lookup, crops, agent queries,
health and metrics.
"""

from typing import Any

import pydantic
from django.http import FileResponse, HttpRequest, HttpResponse
from ninja import NinjaAPI
from ninja.renderers import BaseRenderer
from prometheus_client import CONTENT_TYPE_LATEST, generate_latest

from apps.agent.services import AgentService
from apps.core.exceptions import InvalidArgumentError, NotFoundError, ParseError, ServiceUnavailableError, status_for
from apps.core.serialization import dumps, loads
from apps.tools.schemas import ToolCall

from .exceptions import APIExceptionHandler
from .state import ServerState


class CanonicalRenderer(BaseRenderer):
    """Sorted keys, compact separators."""

    media_type = "application/json"

    def render(self, request: HttpRequest, data: Any, *, response_status: int) -> bytes:
        return dumps(data)


api = NinjaAPI(
    title="Scene Memory Tool Server",
    version="1.0.0",
    description="Spatial tools, component lookup and grounded question answering over one scene memory",
    renderer=CanonicalRenderer(),
    docs_url="/docs",
    openapi_url="/openapi.json",
    urls_namespace="api",
)

api.add_exception_handler(Exception, APIExceptionHandler.handle_exception)


def _json_body(request: HttpRequest) -> Any:
    try:
        return loads(request.body or b"")
    except ValueError as e:
        raise ParseError(f"request body is not valid JSON: {e}")


@api.post("/tools/call", tags=["Tools"])
def call_tool(request: HttpRequest):
    """Dispatch one tool call; the body and result use the tool wire schema."""
    raw = _json_body(request)
    if not isinstance(raw, dict):
        raise InvalidArgumentError("tool call must be a JSON object")
    try:
        call = ToolCall.model_validate(raw)
    except pydantic.ValidationError as e:
        fields = sorted({".".join(str(p) for p in err["loc"]) or "(root)" for err in e.errors()})
        raise InvalidArgumentError(f"malformed tool call: {', '.join(fields)}")
    result = ServerState.current().registry.dispatch(call)
    status = 200 if result.ok else status_for(result.error_code)
    return api.create_response(request, result.to_wire(), status=status)


@api.get("/tools", tags=["Tools"])
def list_tools(request: HttpRequest):
    return [spec.model_dump() for spec in ServerState.current().registry.specs()]


@api.get("/components/{component_id}", tags=["Components"])
def get_component(request: HttpRequest, component_id: int):
    return ServerState.current().memory.get(component_id).to_wire()


@api.get("/components/{component_id}/crops/{rank}", tags=["Components"])
def get_crop(request: HttpRequest, component_id: int, rank: int):
    """Image bytes of the component's ``rank``-th crop (best view first)."""
    memory = ServerState.current().memory
    component = memory.get(component_id)
    if not 0 <= rank < len(component.crop_refs):
        raise NotFoundError(f"component {component_id} has {len(component.crop_refs)} crops, no crop {rank}")
    path = memory.resolve_crop(component.crop_refs[rank])
    return FileResponse(path.open("rb"), content_type="image/png")


@api.post("/query", tags=["Agent"])
def query(request: HttpRequest):
    """``{question}`` → ``{answer, tags, transcript}``."""
    state = ServerState.current()
    if state.client is None:
        raise ServiceUnavailableError("no model client configured for queries; set MODEL_BASE_URL and MODEL_NAME")
    raw = _json_body(request)
    question = raw.get("question") if isinstance(raw, dict) else None
    if not isinstance(question, str) or not question.strip():
        raise InvalidArgumentError("body must be {\"question\": <non-empty string>}")
    answer, transcript = AgentService.run_query(question, state.memory, state.registry, state.client)
    return AgentService.response(answer, transcript)


@api.get("/healthz", tags=["System"])
def healthz(request: HttpRequest):
    return {"ok": True, "component_count": len(ServerState.current().memory)}


@api.get("/metrics", tags=["System"])
def metrics(request: HttpRequest):
    return HttpResponse(generate_latest(), content_type=CONTENT_TYPE_LATEST)
