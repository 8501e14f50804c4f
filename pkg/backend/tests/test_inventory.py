import pytest
from PIL import Image

from apps.bundles.services import BundleService
from apps.core.exceptions import ClientError
from apps.inventory.lemmatizer import RuleBasedLemmatizer
from apps.inventory.schemas import FrameRun, LabelObservation
from apps.inventory.services import InventoryConfig, InventoryService
from libs.modelsdk.contracts import ImageCropRequest
from libs.modelsdk.exceptions import ModelClientError
from libs.modelsdk.mock_client import FixtureEmbeddingClient, FixtureVisionClient


class FlakyVision:
    """Fails ``failures`` times before answering."""

    def __init__(self, failures: int, labels: list[str], retriable: bool = True):
        self.failures = failures
        self.labels = labels
        self.retriable = retriable
        self.calls = 0

    def enumerate_objects(self, image_ref: str, image_path: str) -> list[str]:
        self.calls += 1
        if self.calls <= self.failures:
            raise ModelClientError("upstream timeout", retriable=self.retriable)
        return self.labels


@pytest.mark.unit
class TestLemmatizer:
    @pytest.mark.parametrize(
        "label,expected",
        [
            ("Chairs", "chair"),
            ("  Office   Chairs ", "office chair"),
            ("boxes", "box"),
            ("shelves", "shelf"),
            ("batteries", "battery"),
            ("glasses", "glasses"),
            ("bus", "bus"),
            ("child's toys", "child toy"),
            ("crates", "crate"),
        ],
    )
    def test_singularizes_head_noun(self, label, expected):
        assert RuleBasedLemmatizer().lemmatize(label) == expected


@pytest.mark.unit
class TestNormalizeLabels:
    """Embedding clustering of normalized label forms."""

    def test_orthogonal_embeddings_stay_apart(self):
        embedder = FixtureEmbeddingClient({"chair": [1, 0], "table": [0, 1]})
        mapping = InventoryService.normalize_labels(["chair", "Chairs", "table"], embedder, 0.05)
        assert mapping["chair"].slug == "chair"
        assert mapping["Chairs"].slug == "chair"
        assert mapping["table"].slug == "table"

    def test_near_duplicates_merge_with_lexicographic_slug(self):
        embedder = FixtureEmbeddingClient({"sofa": [1.0, 0.0], "couch": [1.0, 0.0], "lamp": [0.0, 1.0]})
        mapping = InventoryService.normalize_labels(["sofa", "couch", "lamp"], embedder, 0.05)
        assert mapping["sofa"].slug == mapping["couch"].slug == "couch"
        assert mapping["sofa"].members == frozenset({"sofa", "couch"})
        assert mapping["lamp"].slug == "lamp"

    def test_empty_input(self):
        assert InventoryService.normalize_labels([], FixtureEmbeddingClient(), 0.05) == {}


@pytest.mark.unit
class TestFrameRuns:
    """Hole filling and minimum run length."""

    def test_gap_of_three_is_filled(self):
        assert InventoryService.fill_holes_and_extract_runs([1, 2, 6, 7, 8], 3, 5) == (FrameRun(1, 8),)

    def test_gap_of_four_splits(self):
        runs = InventoryService.fill_holes_and_extract_runs([1, 2, 7, 8, 9, 10, 11], 3, 5)
        assert runs == (FrameRun(7, 11),)

    def test_short_runs_dropped(self):
        assert InventoryService.fill_holes_and_extract_runs([0, 1, 2, 3], 3, 5) == ()
        assert InventoryService.fill_holes_and_extract_runs([0, 1, 2, 3, 4], 3, 5) == (FrameRun(0, 4),)

    def test_empty(self):
        assert InventoryService.fill_holes_and_extract_runs([], 3, 5) == ()

    def test_run_helpers(self):
        run = FrameRun(3, 7)
        assert run.length == 5
        assert run.covers(3) and run.covers(7) and not run.covers(8)


@pytest.mark.unit
class TestObjectFrameIndex:
    def test_boxes3_index(self, boxes3_dir):
        bundle = BundleService.load_bundle(boxes3_dir)
        observations = InventoryService.enumerate_bundle(
            bundle, FixtureVisionClient.from_dir(boxes3_dir), InventoryConfig(parallel_jobs=1)
        )
        index, mapping = InventoryService.build_object_frame_index(
            observations, FixtureEmbeddingClient.from_dir(boxes3_dir), InventoryConfig()
        )
        assert index.to_dict() == {
            "blue box": [[0, 9]],
            "crate": [[0, 4]],
            "green box": [[0, 9]],
            "red box": [[0, 9]],
        }
        assert mapping["Blue box"].slug == "blue box"
        assert mapping["crates"].slug == "crate"
        assert index.run_for("crate", 0) == FrameRun(0, 4)
        assert index.run_for("crate", 1) is None
        assert [(slug, seq) for slug, seq, _ in index.sequences()] == [
            ("blue box", 0),
            ("crate", 0),
            ("green box", 0),
            ("red box", 0),
        ]

    def test_sequences_indexed_by_run_order(self):
        observations = [LabelObservation(frame_id=f, raw_label="lamp") for f in [*range(0, 5), *range(20, 26)]]
        index, _ = InventoryService.build_object_frame_index(
            observations, FixtureEmbeddingClient({"lamp": [1.0, 0.0]}), InventoryConfig()
        )
        assert index.runs["lamp"] == (FrameRun(0, 4), FrameRun(20, 25))
        assert index.run_for("lamp", 1) == FrameRun(20, 25)

    def test_blank_labels_rejected(self):
        with pytest.raises(ValueError):
            LabelObservation(frame_id=0, raw_label="   ")


@pytest.mark.unit
class TestEnumerateRetries:
    def _frame(self, boxes3_dir):
        return BundleService.load_bundle(boxes3_dir).frames[0]

    def test_retries_then_succeeds(self, boxes3_dir):
        vision = FlakyVision(2, ["lamp", " ", "desk "])
        config = InventoryConfig(client_attempts=3, backoff_base=0.0)
        assert InventoryService.enumerate_objects(self._frame(boxes3_dir), vision, config=config) == ["lamp", "desk"]
        assert vision.calls == 3

    def test_gives_up_after_attempts(self, boxes3_dir):
        vision = FlakyVision(5, ["lamp"])
        config = InventoryConfig(client_attempts=2, backoff_base=0.0)
        with pytest.raises(ClientError):
            InventoryService.enumerate_objects(self._frame(boxes3_dir), vision, config=config)
        assert vision.calls == 2

    def test_non_retriable_fails_fast(self, boxes3_dir):
        vision = FlakyVision(5, ["lamp"], retriable=False)
        config = InventoryConfig(client_attempts=3, backoff_base=0.0)
        with pytest.raises(ClientError):
            InventoryService.enumerate_objects(self._frame(boxes3_dir), vision, config=config)
        assert vision.calls == 1


@pytest.mark.unit
class TestFixtureImageEmbeddings:
    def _request(self, path, label: str) -> ImageCropRequest:
        return ImageCropRequest(image_ref=path.name, image_path=str(path), box=(0, 0, 4, 4), label=label)

    def test_colour_and_label_vectors_share_dimension(self, tmp_path):
        Image.new("RGB", (4, 4), (255, 0, 0)).save(tmp_path / "red.png")
        embedder = FixtureEmbeddingClient({"chair": [0.0, 0.0, 0.0, 1.0]})
        seen, missing = embedder.embed_images(
            [self._request(tmp_path / "red.png", "chair"), self._request(tmp_path / "gone.png", "chair")]
        )
        assert seen == pytest.approx([1.0, 0.0, 0.0, 0.0])
        assert missing == pytest.approx([0.0, 0.0, 0.0, 1.0])

    def test_narrow_dimension_uses_label(self, tmp_path):
        Image.new("RGB", (4, 4), (255, 0, 0)).save(tmp_path / "red.png")
        embedder = FixtureEmbeddingClient({"chair": [0.0, 1.0]})
        assert embedder.embed_images([self._request(tmp_path / "red.png", "chair")]) == [pytest.approx([0.0, 1.0])]
