"""
Shared fixtures: the boxes3 bundle, its ingested memory, and small
hand-built memories.
"""

import pytest

from apps.geometry.schemas import Aabb3, Point3
from apps.memory.schemas import Component
from apps.memory.services import SceneMemory
from apps.pipeline.services import PipelineService

from .fixtures.boxes3 import write_boxes3


def make_component(component_id: int, centroid, half=0.25, caption: str = "", **attributes) -> Component:
    """A cube of half-width ``half`` around ``centroid``."""
    c = Point3.of(centroid)
    h = Point3.of(half if isinstance(half, (tuple, list)) else (half, half, half))
    return Component(
        component_id=component_id,
        centroid=c,
        bbox=Aabb3(Point3(c.x - h.x, c.y - h.y, c.z - h.z), Point3(c.x + h.x, c.y + h.y, c.z + h.z)),
        caption=caption,
        attributes={k: str(v) for k, v in attributes.items()},
    )


@pytest.fixture
def boxes3_dir(tmp_path):
    return write_boxes3(tmp_path / "boxes3")


@pytest.fixture(scope="session")
def boxes3_ingest(tmp_path_factory):
    """``(memory, stats, out_dir)`` of one boxes3 ingest, shared by read-only tests."""
    root = tmp_path_factory.mktemp("boxes3")
    bundle = write_boxes3(root / "bundle")
    memory, stats = PipelineService.ingest_pipeline(bundle, root / "memory")
    return memory, stats, root / "memory"


@pytest.fixture
def room_memory():
    """Six components in a 10 m room, captions chosen for search tests."""
    return SceneMemory(
        [
            make_component(0, (0.0, 0.0, 0.0), caption="red office chair"),
            make_component(1, (3.0, 4.0, 0.0), caption="wooden dining table"),
            make_component(2, (1.0, 0.0, 0.0), caption="red rug", material="wool"),
            make_component(3, (8.0, 8.0, 0.5), caption="fire extinguisher on the wall"),
            make_component(4, (8.5, 8.0, 0.5), caption="first aid kit"),
            make_component(5, (0.5, 0.5, 0.3), caption="power outlet"),
        ]
    )
