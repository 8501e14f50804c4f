import pytest

from apps.core.exceptions import PipelineStageError
from apps.memory.services import SceneMemory
from apps.pipeline.schemas import STAGES
from apps.pipeline.services import PipelineService

from .fixtures import boxes3


@pytest.mark.e2e
class TestIngestBoxes3:
    """Full ingest of the three-box bundle with fixture clients."""

    def test_three_components_at_box_centers(self, boxes3_ingest):
        memory, _, _ = boxes3_ingest
        components = memory.components()
        assert [c.component_id for c in components] == [0, 1, 2]
        captions = {c.caption: c for c in components}
        assert sorted(captions) == ["a blue plastic crate", "a green box", "a red box"]

        for caption, slug in [("a blue plastic crate", "blue box"), ("a green box", "green box"), ("a red box", "red box")]:
            assert tuple(captions[caption].centroid) == pytest.approx(boxes3.EXPECTED_CENTROIDS[slug], abs=1e-6)

    def test_boxes_cover_cubes(self, boxes3_ingest):
        memory, _, _ = boxes3_ingest
        for component in memory.components():
            extent = [hi - lo for lo, hi in zip(component.bbox.min, component.bbox.max)]
            assert extent == pytest.approx([boxes3.CUBE] * 3, abs=1e-9)

    def test_stats(self, boxes3_ingest):
        _, stats, _ = boxes3_ingest
        assert stats.counts == {
            "frames": 10,
            "masks": 36,
            "points": 556,
            "instances": 5,
            "nodes": 5,
            "edges": 2,
            "merges_applied": 1,
            "merges_rejected": 1,
            "components_dropped": 1,
            "components": 3,
        }
        assert list(stats.timings) == list(STAGES)
        assert all(seconds >= 0 for seconds in stats.timings.values())

    def test_snapshot_and_crops_written(self, boxes3_ingest):
        memory, _, out_dir = boxes3_ingest
        assert (out_dir / "components.jsonl").is_file()
        for component in memory.components():
            assert 1 <= len(component.crop_refs) <= 3
            for ref in component.crop_refs:
                assert (out_dir / ref).is_file()
                assert memory.resolve_crop(ref) == (out_dir / ref).resolve()

    def test_snapshot_reloads(self, boxes3_ingest):
        memory, _, out_dir = boxes3_ingest
        reloaded = SceneMemory.load(out_dir)
        assert reloaded.components() == memory.components()
        assert reloaded.search_text("crate", 1)[0][0] == 0

    def test_ingest_is_deterministic(self, tmp_path, boxes3_dir):
        PipelineService.ingest_pipeline(boxes3_dir, tmp_path / "first")
        PipelineService.ingest_pipeline(boxes3_dir, tmp_path / "second")
        first = (tmp_path / "first" / "components.jsonl").read_bytes()
        second = (tmp_path / "second" / "components.jsonl").read_bytes()
        assert first == second


@pytest.mark.integration
class TestIngestEdgeCases:
    def test_empty_bundle_gives_empty_memory(self, tmp_path):
        bundle = boxes3.write_empty_bundle(tmp_path / "empty")
        memory, stats = PipelineService.ingest_pipeline(bundle, tmp_path / "memory")
        assert memory.components() == []
        assert stats.counts["components"] == 0
        assert SceneMemory.load(tmp_path / "memory").components() == []

    def test_missing_bundle_names_stage(self, tmp_path):
        with pytest.raises(PipelineStageError) as excinfo:
            PipelineService.ingest_pipeline(tmp_path / "nowhere", tmp_path / "memory")
        assert excinfo.value.stage == "inventory"
        assert excinfo.value.code == "stage_failed"
        assert excinfo.value.details == {"stage": "inventory"}
