"""
The scene memory: an indexed, persistent component store.
"""

import logging
import shutil
from collections.abc import Iterable
from pathlib import Path

import numpy as np
from pydantic import Field

from apps.core.config import SettingsConfig
from apps.core.exceptions import ConflictError, InvalidArgumentError, IoError, NotFoundError, ParseError, ValidationError
from apps.core.serialization import iter_jsonl, write_jsonl
from apps.geometry.schemas import Point3

from .bm25 import Bm25Index
from .locks import ReadWriteLock
from .schemas import SNAPSHOT_VERSION, Component
from .spatial import SpatialGrid

logger = logging.getLogger(__name__)

COMPONENTS_FILE = "components.jsonl"
POINTS_FILE = "scene_points.npy"
CROPS_DIR = "crops"


class MemoryConfig(SettingsConfig):
    settings_name = "MEMORY_CONFIG"

    bm25_k1: float = Field(default=1.2, ge=0)
    bm25_b: float = Field(default=0.75, ge=0, le=1)
    grid_cell: float = Field(default=1.0, gt=0)
    linear_scan_below: int = Field(default=64, ge=0)


class SceneMemory:
    """Components keyed by id with a spatial grid and a BM25 text index.

    Reads may run concurrently; mutations are serialized and update both
    indexes before readers can observe them.
    """

    def __init__(
        self,
        components: Iterable[Component] = (),
        *,
        root: Path | None = None,
        scene_points: np.ndarray | None = None,
        config: MemoryConfig | None = None,
    ):
        self.config = config or MemoryConfig.from_settings()
        self.root = root
        self.scene_points = scene_points
        self._lock = ReadWriteLock()
        self._components: dict[int, Component] = {}
        self._text = Bm25Index(self.config.bm25_k1, self.config.bm25_b)
        self._grid = SpatialGrid(self.config.grid_cell, self.config.linear_scan_below)
        for component in components:
            self.insert(component)

    # =========================================================================
    # MUTATIONS
    # =========================================================================

    def _index(self, component: Component) -> None:
        self._components[component.component_id] = component
        self._text.put(component.component_id, component.search_text())
        self._grid.put(component.component_id, component.centroid)

    def insert(self, component: Component) -> None:
        with self._lock.write():
            if component.component_id in self._components:
                raise ConflictError(f"component {component.component_id} already exists")
            self._index(component)

    def update(self, component: Component) -> None:
        with self._lock.write():
            if component.component_id not in self._components:
                raise ConflictError(f"component {component.component_id} does not exist")
            self._index(component)

    def append_attribute(self, component_id: int, key: str, value: str) -> Component:
        if not key:
            raise InvalidArgumentError("attribute key must not be empty")
        with self._lock.write():
            current = self._components.get(component_id)
            if current is None:
                raise NotFoundError(f"component {component_id} not found")
            updated = current.with_attribute(key, value)
            self._index(updated)
        logger.info(f"Appended attribute '{key}' to component {component_id}")
        return updated

    # =========================================================================
    # QUERIES
    # =========================================================================

    def __len__(self) -> int:
        return len(self._components)

    def get(self, component_id: int) -> Component:
        with self._lock.read():
            component = self._components.get(component_id)
        if component is None:
            raise NotFoundError(f"component {component_id} not found")
        return component

    def components(self) -> list[Component]:
        with self._lock.read():
            return [self._components[i] for i in sorted(self._components)]

    def search_text(self, query: str, limit: int = 10) -> list[tuple[int, float]]:
        if not query or not query.strip():
            raise InvalidArgumentError("query must not be empty")
        if limit < 1:
            raise InvalidArgumentError(f"limit must be >= 1, got {limit}")
        with self._lock.read():
            return self._text.search(query, limit)

    def query_radius(self, center: Point3, radius: float) -> list[tuple[int, float]]:
        if radius < 0:
            raise InvalidArgumentError(f"radius must be >= 0, got {radius}")
        with self._lock.read():
            return self._grid.query_radius(Point3.of(center), radius)

    def nearest(self, center: Point3, k: int) -> list[tuple[int, float]]:
        if k < 1:
            raise InvalidArgumentError(f"k must be >= 1, got {k}")
        with self._lock.read():
            return self._grid.nearest(Point3.of(center), k)

    def summary(self) -> dict:
        with self._lock.read():
            return {
                "component_count": len(self._components),
                "attribute_keys": sorted({k for c in self._components.values() for k in c.attributes}),
            }

    def resolve_crop(self, ref: str) -> Path:
        """Absolute path of a crop reference, confined to the memory root."""
        if self.root is None:
            raise IoError(f"memory has no root directory to resolve {ref}")
        root = self.root.resolve()
        path = (root / ref).resolve()
        if not path.is_relative_to(root):
            raise IoError(f"crop reference escapes the memory root: {ref}")
        if not path.is_file():
            raise IoError(f"crop file missing: {ref}")
        return path

    # =========================================================================
    # PERSISTENCE
    # =========================================================================

    def save(self, path: Path | str) -> None:
        """Write ``components.jsonl`` (header line first), crops and scene points."""
        target = Path(path)
        target.mkdir(parents=True, exist_ok=True)
        with self._lock.read():
            records = [{"scene_memory_version": SNAPSHOT_VERSION}]
            records += [self._components[i].to_record() for i in sorted(self._components)]
            refs = [ref for c in self._components.values() for ref in c.crop_refs]
            write_jsonl(target / COMPONENTS_FILE, records)
            if self.scene_points is not None:
                np.save(target / POINTS_FILE, np.asarray(self.scene_points, dtype=np.float64))
            if self.root is not None and self.root.resolve() != target.resolve():
                for ref in refs:
                    source = self.root / ref
                    if source.is_file():
                        (target / ref).parent.mkdir(parents=True, exist_ok=True)
                        shutil.copyfile(source, target / ref)
        logger.info(f"Saved {len(records) - 1} components to {target}")

    @classmethod
    def load(cls, path: Path | str, config: MemoryConfig | None = None) -> "SceneMemory":
        root = Path(path)
        snapshot = root / COMPONENTS_FILE
        components: list[Component] = []
        seen: set[int] = set()
        header_seen = False
        for line_no, record in iter_jsonl(snapshot):
            position = f"{COMPONENTS_FILE}:{line_no}"
            if not header_seen:
                if not isinstance(record, dict) or record.get("scene_memory_version") != SNAPSHOT_VERSION:
                    raise ParseError("missing or unsupported scene_memory_version header", position=position)
                header_seen = True
                continue
            try:
                component = Component.from_record(record)
            except ValidationError as e:
                raise ParseError(e.message, position=position)
            if component.component_id in seen:
                raise ParseError(f"duplicate component id {component.component_id}", position=position)
            seen.add(component.component_id)
            components.append(component)
        if not header_seen:
            raise ParseError("snapshot is empty", position=f"{COMPONENTS_FILE}:1")

        scene_points = None
        if (root / POINTS_FILE).is_file():
            try:
                scene_points = np.load(root / POINTS_FILE, allow_pickle=False)
            except (OSError, ValueError) as e:
                raise ParseError(f"unreadable scene points: {e}", position=POINTS_FILE)
        memory = cls(components, root=root, scene_points=scene_points, config=config)
        logger.info(f"Loaded {len(memory)} components from {root}")
        return memory
