import pytest
from django.test import Client

from apps.api.state import ServerConfig, ServerState
from apps.core.exceptions import ServiceUnavailableError
from apps.core.serialization import dumps, loads
from apps.tools.registry import ToolPreset, build_registry
from libs.modelsdk.mock_client import ScriptedModelClient


def install(memory, client=None):
    return ServerState.install(ServerState(memory, build_registry(memory, ToolPreset.SPATIAL), client))


@pytest.fixture(autouse=True)
def reset_state():
    yield
    ServerState.install(None)


@pytest.fixture
def http():
    return Client()


def post_json(http: Client, path: str, body) -> tuple[int, dict]:
    response = http.post(path, data=dumps(body), content_type="application/json")
    return response.status_code, loads(response.content)


@pytest.mark.integration
class TestToolEndpoints:
    def test_healthz(self, http, room_memory):
        install(room_memory)
        response = http.get("/healthz")
        assert response.status_code == 200
        assert loads(response.content) == {"ok": True, "component_count": 6}
        assert response["X-Request-ID"]

    def test_request_id_propagated(self, http, room_memory):
        install(room_memory)
        response = http.get("/healthz", HTTP_X_REQUEST_ID="agent-7")
        assert response["X-Request-ID"] == "agent-7"

    def test_call_distance(self, http, room_memory):
        install(room_memory)
        status, body = post_json(http, "/tools/call", {"name": "distance", "arguments": {"a": 0, "b": 1}, "call_id": "d"})
        assert status == 200
        assert body == {"ok": True, "call_id": "d", "payload": 5.0}

    def test_unknown_tool_is_404(self, http, room_memory):
        install(room_memory)
        status, body = post_json(http, "/tools/call", {"name": "teleport", "arguments": {}})
        assert status == 404
        assert body["ok"] is False
        assert body["error"]["code"] == "unknown_tool"

    def test_invalid_arguments_is_400(self, http, room_memory):
        install(room_memory)
        status, body = post_json(http, "/tools/call", {"name": "distance", "arguments": {"a": "zero"}})
        assert status == 400
        assert body["error"]["code"] == "invalid_arguments"

    def test_missing_component_is_404(self, http, room_memory):
        install(room_memory)
        status, body = post_json(http, "/tools/call", {"name": "distance", "arguments": {"a": 0, "b": 99}})
        assert status == 404
        assert body["error"]["code"] == "not_found"

    def test_malformed_json_is_400(self, http, room_memory):
        install(room_memory)
        response = http.post("/tools/call", data=b"{not json", content_type="application/json")
        assert response.status_code == 400
        assert loads(response.content)["error"]["code"] == "parse_error"

    @pytest.mark.parametrize("body", [[1, 2], {"arguments": {}}, {"name": "distance", "surprise": True}])
    def test_malformed_call_is_400(self, http, room_memory, body):
        install(room_memory)
        status, payload = post_json(http, "/tools/call", body)
        assert status == 400
        assert payload["error"]["code"] == "invalid_argument"

    def test_list_tools(self, http, room_memory):
        install(room_memory)
        names = [spec["name"] for spec in loads(http.get("/tools").content)]
        assert names == ["search", "distance", "vicinity", "navigation_distance"]

    def test_get_component(self, http, room_memory):
        install(room_memory)
        body = loads(http.get("/components/3").content)
        assert body["id"] == 3
        assert body["caption"] == "fire extinguisher on the wall"
        assert http.get("/components/42").status_code == 404

    def test_metrics(self, http, room_memory):
        install(room_memory)
        response = http.get("/metrics")
        assert response.status_code == 200
        assert b"tool_calls" in response.content


@pytest.mark.integration
class TestCrops:
    def test_crop_bytes(self, http, boxes3_ingest):
        memory, _, out_dir = boxes3_ingest
        install(memory)
        component = memory.get(0)
        response = http.get("/components/0/crops/0")
        assert response.status_code == 200
        assert response["Content-Type"] == "image/png"
        assert b"".join(response.streaming_content) == (out_dir / component.crop_refs[0]).read_bytes()

    def test_missing_rank_is_404(self, http, boxes3_ingest):
        memory, _, _ = boxes3_ingest
        install(memory)
        response = http.get("/components/0/crops/7")
        assert response.status_code == 404
        assert loads(response.content)["error"]["code"] == "not_found"


@pytest.mark.integration
class TestQueryEndpoint:
    def test_without_client_is_503(self, http, room_memory):
        install(room_memory)
        status, body = post_json(http, "/query", {"question": "Where is the rug?"})
        assert status == 503
        assert body["error"]["code"] == "unavailable"

    def test_scripted_answer(self, http, room_memory):
        install(room_memory, ScriptedModelClient(["It is <component_2>the red rug</component_2>."]))
        status, body = post_json(http, "/query", {"question": "Where is the rug?"})
        assert status == 200
        assert body["answer"] == "It is <component_2>the red rug</component_2>."
        assert [tag["component_id"] for tag in body["tags"]] == [2]
        assert body["transcript"][-1]["kind"] == "final_answer"

    def test_empty_question_is_400(self, http, room_memory):
        install(room_memory, ScriptedModelClient([]))
        status, body = post_json(http, "/query", {"question": "  "})
        assert status == 400


@pytest.mark.unit
class TestServerState:
    def test_load_without_memory_dir(self):
        with pytest.raises(ServiceUnavailableError):
            ServerState.load(ServerConfig(memory_dir=""))

    def test_load_from_snapshot(self, tmp_path, room_memory):
        room_memory.save(tmp_path / "memory")
        state = ServerState.load(ServerConfig(memory_dir=str(tmp_path / "memory"), tool_preset="spatial"))
        assert len(state.memory) == 6
        assert len(state.registry) == 4
        assert state.client is None
