import math

import numpy as np
import pytest

from apps.core.exceptions import (
    ConflictError,
    EmptyGeometryError,
    InvalidArgumentsError,
    NotFoundError,
    OutOfBoundsError,
    ParseError,
    UnknownToolError,
    UnreachableError,
)
from apps.core.serialization import dumps
from apps.geometry.schemas import Point3
from apps.memory.services import MemoryConfig, SceneMemory
from apps.tools.adapters import KvStore
from apps.tools.navigation import NavigationConfig, NavigationService, OccupancyGrid, disk
from apps.tools.registry import ToolPreset, ToolRegistry, build_registry
from apps.tools.schemas import ParamSpec, ToolCall, ToolResult, ToolSpec
from apps.tools.services import SceneTools, sample_component_points

from .conftest import make_component
from .oracles import uniform_cost_path

NAV = NavigationConfig(cell=0.1, floor_percentile=5.0, band_low=0.05, band_high=1.8, inflation=0.2)


def call(registry: ToolRegistry, name: str, **arguments) -> ToolResult:
    return registry.dispatch(ToolCall(name=name, arguments=arguments, call_id="c1"))


def _grid(occupied: np.ndarray, cell: float = 0.1) -> OccupancyGrid:
    return OccupancyGrid(cell=cell, origin=Point3(0.0, 0.0, 0.0), occupied=occupied, floor_z=0.0)


def _walls(name: str) -> tuple[np.ndarray, tuple[int, int], tuple[int, int]]:
    occupied = np.zeros((20, 20), dtype=bool)
    if name == "open":
        pass
    elif name == "wall_with_gap":
        occupied[10, :] = True
        occupied[10, 17] = False
    elif name == "u_shape":
        occupied[5:15, 5] = True
        occupied[5:15, 14] = True
        occupied[14, 5:15] = True
    elif name == "diagonal_slit":
        for i in range(20):
            occupied[i, 19 - i] = True
        occupied[9, 10] = False
    elif name == "zigzag":
        occupied[5, 0:16] = True
        occupied[10, 4:20] = True
        occupied[15, 0:16] = True
    return occupied, (1, 1), (18, 18)


@pytest.fixture
def registry(room_memory):
    return build_registry(room_memory, ToolPreset.FULL, nav_config=NAV)


@pytest.mark.unit
class TestToolSchemas:
    def test_signature(self, registry):
        search = next(spec for spec in registry.specs() if spec.name == "search")
        assert search.signature() == "search(query: string, limit: integer?)"

    def test_result_wire_forms(self):
        assert ToolResult.success("c1", 5.0).to_wire() == {"ok": True, "call_id": "c1", "payload": 5.0}
        failure = ToolResult.failure(None, InvalidArgumentsError("bad", ["b"]))
        assert failure.to_wire() == {
            "ok": False,
            "error": {"fields": ["b"], "code": "invalid_arguments", "message": "bad"},
        }
        assert failure.error_code == "invalid_arguments"

    def test_tool_names_are_identifiers(self):
        with pytest.raises(ValueError):
            ToolSpec(name="Bad Name", description="x")

    def test_call_rejects_unknown_fields(self):
        with pytest.raises(ValueError):
            ToolCall.model_validate({"name": "distance", "args": {}})


@pytest.mark.unit
class TestRegistry:
    """Validation and dispatch."""

    def test_distance(self, registry):
        result = call(registry, "distance", a=0, b=1)
        assert result.ok
        assert result.payload == 5.0
        assert result.call_id == "c1"

    def test_distance_to_self_is_zero(self, registry):
        assert call(registry, "distance", a=3, b=3).payload == 0.0

    def test_unknown_tool(self, registry):
        result = call(registry, "teleport", a=0)
        assert result.error_code == "unknown_tool"
        assert result.error["message"] == "unknown tool 'teleport'"
        with pytest.raises(UnknownToolError):
            registry.validate(ToolCall(name="teleport"))

    @pytest.mark.parametrize(
        "arguments,fields",
        [
            ({"a": 0, "b": "x"}, ["b"]),
            ({"a": 0}, ["b"]),
            ({"a": True, "b": 1}, ["a"]),
            ({"a": 0, "b": 1, "c": 2}, ["c"]),
            ({"a": 1.5, "b": "x"}, ["a", "b"]),
        ],
    )
    def test_invalid_arguments_name_fields(self, registry, arguments, fields):
        result = call(registry, "distance", **arguments)
        assert result.error_code == "invalid_arguments"
        assert result.error["fields"] == fields

    def test_number_accepts_ints_and_rejects_nan(self, registry):
        assert call(registry, "vicinity", id=0, radius=1).ok
        assert call(registry, "vicinity", id=0, radius=math.nan).error_code == "invalid_arguments"

    def test_domain_errors_become_results(self, registry):
        assert call(registry, "distance", a=0, b=99).error_code == "not_found"
        assert call(registry, "vicinity", id=0, radius=-1.0).error_code == "invalid_argument"

    def test_crash_becomes_internal_error(self):
        registry = ToolRegistry()

        def explode() -> None:
            raise RuntimeError("boom")

        registry.register(ToolSpec(name="explode", description="fails"), explode)
        result = registry.dispatch(ToolCall(name="explode"))
        assert result.error_code == "internal_error"
        assert "boom" in result.error["message"]

    def test_duplicate_registration(self):
        registry = ToolRegistry()
        spec = ToolSpec(name="noop", description="nothing", parameters={"x": ParamSpec(type="integer")})
        registry.register(spec, lambda x: x)
        with pytest.raises(ConflictError):
            registry.register(spec, lambda x: x)
        assert "noop" in registry and len(registry) == 1

    def test_optional_parameters_use_handler_defaults(self, registry):
        assert len(call(registry, "search", query="red").payload) == 2
        assert len(call(registry, "search", query="red", limit=1).payload) == 1

    def test_validate_returns_parsed_arguments(self, registry):
        with pytest.raises(InvalidArgumentsError) as exc_info:
            registry.validate(ToolCall(name="search", arguments={"limit": 3}))
        assert exc_info.value.fields == ["query"]
        assert registry.validate(ToolCall(name="search", arguments={"query": "rug"})) == {"query": "rug"}


@pytest.mark.unit
class TestPresets:
    @pytest.mark.parametrize(
        "preset,names",
        [
            (ToolPreset.NONE, []),
            (ToolPreset.SPATIAL, ["search", "distance", "vicinity", "navigation_distance"]),
            (ToolPreset.VISUAL, ["search", "distance", "vicinity", "navigation_distance", "get_image"]),
            (
                ToolPreset.FULL,
                ["search", "distance", "vicinity", "navigation_distance", "get_image", "execute", "annotate"],
            ),
        ],
    )
    def test_preset_tools(self, room_memory, preset, names):
        assert [spec.name for spec in build_registry(room_memory, preset).specs()] == names

    def test_preset_by_name(self, room_memory):
        assert len(build_registry(room_memory, "spatial")) == 4
        with pytest.raises(ValueError):
            build_registry(room_memory, "everything")


@pytest.mark.unit
class TestSceneTools:
    def test_search_payload(self, registry):
        hits = call(registry, "search", query="red chair").payload
        assert [hit["id"] for hit in hits] == [0, 2]
        assert hits[0]["caption"] == "red office chair"
        assert hits[0]["centroid"] == [0.0, 0.0, 0.0]

    def test_vicinity_excludes_self_and_sorts(self, registry):
        hits = call(registry, "vicinity", id=0, radius=1.0).payload
        assert [hit["id"] for hit in hits] == [5, 2]
        assert hits[1]["distance"] == 1.0

    def test_zero_radius_vicinity_is_empty(self, registry):
        assert call(registry, "vicinity", id=0, radius=0.0).payload == []

    def test_get_image_resolves_crops(self, tmp_path):
        (tmp_path / "crops").mkdir()
        (tmp_path / "crops/a.png").write_bytes(b"png")
        with_crop = make_component(0, (0, 0, 0)).model_copy(update={"crop_refs": ("crops/a.png",)})
        missing = make_component(1, (2, 0, 0)).model_copy(update={"crop_refs": ("crops/b.png",)})
        registry = build_registry(SceneMemory([with_crop, missing], root=tmp_path), ToolPreset.VISUAL)
        assert call(registry, "get_image", id=0).payload == ["crops/a.png"]
        assert call(registry, "get_image", id=1).error_code == "io_error"

    def test_occupancy_needs_geometry(self):
        with pytest.raises(EmptyGeometryError):
            SceneTools(SceneMemory(config=MemoryConfig()), NAV).occupancy()

    def test_sample_component_points_fill_boxes(self):
        points = sample_component_points([make_component(0, (1, 1, 1), half=0.25)], 0.1)
        assert points.min(axis=0).tolist() == [0.75, 0.75, 0.75]
        assert points.max(axis=0).tolist() == [1.25, 1.25, 1.25]
        assert sample_component_points([], 0.1).shape == (0, 3)


@pytest.mark.unit
class TestAdapters:
    def test_kv_lookup_tool(self, tmp_path, room_memory):
        path = tmp_path / "regulations.json"
        path.write_bytes(dumps({"fire extinguisher": "Inspect monthly.", "exits": 2}))
        registry = build_registry(
            room_memory, kv_stores=[{"PATH": str(path), "NAME": "regulations", "DESCRIPTION": "Building rules."}]
        )
        assert call(registry, "regulations", key="fire extinguisher").payload == "Inspect monthly."
        assert call(registry, "regulations", key="exits").payload == "2"
        assert call(registry, "regulations", key="elevators").error_code == "not_found"

    def test_kv_store_errors(self, tmp_path):
        with pytest.raises(NotFoundError):
            KvStore.from_path(tmp_path / "absent.json")
        (tmp_path / "bad.json").write_bytes(b"{nope")
        with pytest.raises(ParseError):
            KvStore.from_path(tmp_path / "bad.json")
        (tmp_path / "list.json").write_bytes(b"[1, 2]")
        with pytest.raises(ParseError):
            KvStore.from_path(tmp_path / "list.json")

    def test_annotate_makes_facts_searchable(self, registry, room_memory):
        result = call(registry, "annotate", id=4, key="expires", value="march 2027")
        assert result.payload["attrs"] == {"expires": "march 2027"}
        assert [hit["id"] for hit in call(registry, "search", query="expires march").payload] == [4]
        assert room_memory.get(4).attributes == {"expires": "march 2027"}

    def test_annotate_unknown_component(self, registry):
        assert call(registry, "annotate", id=77, key="k", value="v").error_code == "not_found"


@pytest.mark.unit
class TestGridPaths:
    """A* against uniform-cost search on hand-drawn wall layouts."""

    @pytest.mark.parametrize("layout", ["open", "wall_with_gap", "u_shape", "diagonal_slit", "zigzag"])
    def test_matches_uniform_cost_search(self, layout):
        occupied, start, goal = _walls(layout)
        expected = uniform_cost_path(occupied, start, goal)
        length = NavigationService.grid_path_length(_grid(occupied), start, goal)
        assert length == pytest.approx(expected * 0.1, abs=1e-9)

    def test_open_grid_is_octile(self):
        occupied = np.zeros((10, 10), dtype=bool)
        length = NavigationService.grid_path_length(_grid(occupied, cell=1.0), (0, 0), (6, 2))
        assert length == pytest.approx(4 + 2 * math.sqrt(2))

    def test_no_corner_cutting(self):
        occupied = np.zeros((3, 3), dtype=bool)
        occupied[1, 0] = True
        length = NavigationService.grid_path_length(_grid(occupied, cell=1.0), (0, 0), (1, 1))
        assert length == pytest.approx(2.0)

    def test_sealed_wall_is_unreachable(self):
        occupied = np.zeros((20, 20), dtype=bool)
        occupied[10, :] = True
        with pytest.raises(UnreachableError):
            NavigationService.grid_path_length(_grid(occupied), (1, 1), (18, 18))
        assert uniform_cost_path(occupied, (1, 1), (18, 18)) is None

    def test_occupied_endpoint(self):
        occupied = np.zeros((5, 5), dtype=bool)
        occupied[0, 0] = True
        with pytest.raises(UnreachableError):
            NavigationService.grid_path_length(_grid(occupied), (0, 0), (4, 4))

    def test_nearest_free(self):
        occupied = np.zeros((5, 5), dtype=bool)
        occupied[1:4, 1:4] = True
        occupied[2, 3] = False
        assert NavigationService.nearest_free(_grid(occupied), (2, 2)) == (2, 3)
        with pytest.raises(UnreachableError):
            NavigationService.nearest_free(_grid(np.ones((3, 3), dtype=bool)), (1, 1))

    def test_cell_of_bounds(self):
        grid = _grid(np.zeros((10, 10), dtype=bool))
        assert grid.cell_of(0.05, 0.95) == (0, 9)
        with pytest.raises(OutOfBoundsError):
            grid.cell_of(1.05, 0.0)

    def test_disk(self):
        assert disk(1).tolist() == [[False, True, False], [True, True, True], [False, True, False]]


def _room_points(with_wall: bool) -> np.ndarray:
    xs = np.arange(0.0, 3.0001, 0.05)
    floor = np.array([(x, y, 0.0) for x in xs for y in xs])
    if not with_wall:
        return floor
    wall = np.array([(1.5, y, z) for y in np.arange(0.0, 2.4001, 0.05) for z in (0.5, 0.75, 1.0)])
    return np.concatenate([floor, wall])


@pytest.mark.unit
class TestNavigationDistance:
    def _memory(self, with_wall: bool) -> SceneMemory:
        return SceneMemory(
            [make_component(0, (0.53, 1.53, 0.3), half=0.1), make_component(1, (2.53, 1.53, 0.3), half=0.1)],
            scene_points=_room_points(with_wall),
            config=MemoryConfig(),
        )

    def test_occupancy_band_and_inflation(self):
        grid = NavigationService.build_occupancy(_room_points(True), NAV)
        assert grid.floor_z == 0.0
        assert grid.occupied[grid.cell_of(1.5, 1.0)]
        assert grid.occupied[grid.cell_of(1.69, 1.0)]
        assert not grid.occupied[grid.cell_of(1.85, 1.0)]
        assert not grid.occupied[grid.cell_of(1.5, 2.9)]
        assert not grid.occupied[grid.cell_of(0.5, 1.5)]

    def test_open_room_matches_straight_line(self):
        tools = SceneTools(self._memory(with_wall=False), NAV)
        assert tools.navigation_distance(0, 1) == pytest.approx(2.0, abs=0.1)

    def test_wall_forces_detour(self):
        tools = SceneTools(self._memory(with_wall=True), NAV)
        walked = tools.navigation_distance(0, 1)
        assert tools.distance(0, 1) == 2.0
        assert 2.9 < walked < 3.6

    @pytest.mark.parametrize("with_wall", [False, True])
    def test_equals_uniform_cost_search_on_grid(self, with_wall):
        memory = self._memory(with_wall)
        tools = SceneTools(memory, NAV)
        grid = tools.occupancy()
        start, goal = (
            NavigationService.nearest_free(grid, grid.cell_of(c.x, c.y))
            for c in (memory.get(0).centroid, memory.get(1).centroid)
        )
        expected = uniform_cost_path(grid.occupied, start, goal)
        assert expected is not None
        assert tools.navigation_distance(0, 1) == pytest.approx(expected * grid.cell, abs=1e-9)

    def test_off_center_centroids_add_nothing(self):
        tools = SceneTools(self._memory(with_wall=False), NAV)
        # both centroids fall in row 18 of the same grid, twenty cells apart
        assert tools.navigation_distance(0, 1) == pytest.approx(2.0, abs=1e-9)

    def test_dispatch_through_registry(self):
        registry = build_registry(self._memory(with_wall=True), ToolPreset.SPATIAL, nav_config=NAV)
        result = call(registry, "navigation_distance", a=0, b=1)
        assert result.ok
        assert result.payload > 2.5

    def test_falls_back_to_component_boxes(self, room_memory):
        tools = SceneTools(room_memory, NAV)
        assert tools.navigation_distance(0, 1) >= tools.distance(0, 1)
        assert tools.occupancy().occupied.any()
