"""
Object inventory: label enumeration, label normalization, frame runs.
"""

import logging
from collections import defaultdict
from collections.abc import Iterable, Sequence

import numpy as np
from joblib import Parallel, delayed
from pydantic import Field
from scipy.cluster.hierarchy import fcluster, linkage

from apps.bundles.schemas import FrameRecord, SceneBundle
from apps.core.config import SettingsConfig
from apps.core.exceptions import ValidationError
from apps.core.retry import call_with_retries
from libs.modelsdk.contracts import EmbeddingClient, VisionLanguageClient

from .lemmatizer import Lemmatizer, RuleBasedLemmatizer
from .schemas import CanonicalLabel, FrameRun, LabelObservation, ObjectFrameIndex

logger = logging.getLogger(__name__)


class InventoryConfig(SettingsConfig):
    settings_name = "INVENTORY_CONFIG"

    cluster_threshold: float = Field(default=0.05, ge=0)
    max_gap: int = Field(default=3, ge=0)
    min_run: int = Field(default=5, ge=1)
    client_attempts: int = Field(default=3, ge=1)
    backoff_base: float = Field(default=0.5, ge=0)
    parallel_jobs: int = Field(default=4, ge=1)


class InventoryService:
    """Builds the canonical objects-to-frames index for a bundle."""

    lemmatizer: Lemmatizer = RuleBasedLemmatizer()

    @classmethod
    def enumerate_objects(
        cls,
        frame: FrameRecord,
        vlm: VisionLanguageClient,
        *,
        bundle: SceneBundle | None = None,
        config: InventoryConfig | None = None,
    ) -> list[str]:
        config = config or InventoryConfig.from_settings()
        image_path = str(bundle.root / frame.image_ref) if bundle is not None else frame.image_ref
        labels = call_with_retries(
            lambda: vlm.enumerate_objects(frame.image_ref, image_path),
            attempts=config.client_attempts,
            backoff_base=config.backoff_base,
            what=f"object enumeration for frame {frame.frame_id}",
        )
        return [label.strip() for label in labels if isinstance(label, str) and label.strip()]

    @classmethod
    def enumerate_bundle(
        cls,
        bundle: SceneBundle,
        vlm: VisionLanguageClient,
        config: InventoryConfig | None = None,
    ) -> list[LabelObservation]:
        """Enumerate every frame (threaded) and flatten to observations in frame order."""
        config = config or InventoryConfig.from_settings()
        per_frame = Parallel(n_jobs=config.parallel_jobs, prefer="threads")(
            delayed(cls.enumerate_objects)(frame, vlm, bundle=bundle, config=config) for frame in bundle.frames
        )
        return [
            LabelObservation(frame_id=frame.frame_id, raw_label=label)
            for frame, labels in zip(bundle.frames, per_frame)
            for label in labels
        ]

    @classmethod
    def normalize(cls, label: str) -> str:
        return cls.lemmatizer.lemmatize(label)

    @classmethod
    def normalize_labels(
        cls,
        labels: Iterable[str],
        embedder: EmbeddingClient,
        threshold: float = 0.05,
    ) -> dict[str, CanonicalLabel]:
        """Map each raw label to its canonical label.

        Normalized forms are clustered with average-linkage on cosine distance,
        merging while the linkage distance stays within ``threshold``.
        """
        raw_by_form: dict[str, set[str]] = defaultdict(set)
        for raw in labels:
            form = cls.normalize(raw)
            if form:
                raw_by_form[form].add(raw)
        forms = sorted(raw_by_form)
        if not forms:
            return {}

        vectors = cls._embed(forms, embedder)
        if len(forms) == 1:
            assignments = np.zeros(1, dtype=np.int64)
        else:
            tree = linkage(vectors, method="average", metric="cosine")
            assignments = fcluster(tree, t=threshold, criterion="distance")

        clusters: dict[int, list[int]] = defaultdict(list)
        for row, cluster in enumerate(assignments.tolist()):
            clusters[cluster].append(row)

        mapping: dict[str, CanonicalLabel] = {}
        for rows in clusters.values():
            canonical = cls._canonical(forms, vectors, rows)
            for row in rows:
                for raw in raw_by_form[forms[row]]:
                    mapping[raw] = canonical
        logger.info(f"Normalized {len(forms)} label forms into {len(clusters)} canonical labels")
        return mapping

    @staticmethod
    def _embed(forms: list[str], embedder: EmbeddingClient) -> np.ndarray:
        vectors = embedder.embed_texts(forms)
        if len(vectors) != len(forms):
            raise ValidationError(f"embedder returned {len(vectors)} vectors for {len(forms)} labels")
        dims = {len(v) for v in vectors}
        if len(dims) != 1:
            raise ValidationError(f"embedding dimension mismatch: {sorted(dims)}")
        array = np.asarray(vectors, dtype=np.float64)
        norms = np.linalg.norm(array, axis=1, keepdims=True)
        if not np.all(norms > 0):
            raise ValidationError("embedder returned a zero vector")
        return array / norms

    @staticmethod
    def _canonical(forms: list[str], vectors: np.ndarray, rows: list[int]) -> CanonicalLabel:
        mean = vectors[rows].mean(axis=0)
        norm = np.linalg.norm(mean)
        mean = mean / norm if norm > 0 else vectors[rows[0]]
        # cosine distance rounded so float noise cannot beat the lexicographic tie rule
        slug = min(rows, key=lambda r: (round(1.0 - float(vectors[r] @ mean), 12), forms[r]))
        return CanonicalLabel(
            slug=forms[slug],
            members=frozenset(forms[r] for r in rows),
            embedding=tuple(mean.tolist()),
        )

    @staticmethod
    def fill_holes_and_extract_runs(
        frame_ids: Sequence[int], max_gap: int = 3, min_run: int = 5
    ) -> tuple[FrameRun, ...]:
        """Backfill gaps of at most ``max_gap`` missing frames, keep runs of ``min_run`` or more."""
        if not frame_ids:
            return ()
        runs: list[FrameRun] = []
        start = previous = frame_ids[0]
        for frame_id in frame_ids[1:]:
            if frame_id - previous - 1 > max_gap:
                runs.append(FrameRun(start, previous))
                start = frame_id
            previous = frame_id
        runs.append(FrameRun(start, previous))
        return tuple(run for run in runs if run.length >= min_run)

    @classmethod
    def build_object_frame_index(
        cls,
        observations: Sequence[LabelObservation],
        embedder: EmbeddingClient,
        config: InventoryConfig | None = None,
    ) -> tuple[ObjectFrameIndex, dict[str, CanonicalLabel]]:
        """Normalize labels, then extract cleaned frame runs per canonical slug."""
        config = config or InventoryConfig.from_settings()
        mapping = cls.normalize_labels({o.raw_label for o in observations}, embedder, config.cluster_threshold)

        frames_per_slug: dict[str, set[int]] = defaultdict(set)
        for observation in observations:
            canonical = mapping.get(observation.raw_label)
            if canonical is not None:
                frames_per_slug[canonical.slug].add(observation.frame_id)

        runs: dict[str, tuple[FrameRun, ...]] = {}
        for slug in sorted(frames_per_slug):
            slug_runs = cls.fill_holes_and_extract_runs(sorted(frames_per_slug[slug]), config.max_gap, config.min_run)
            if slug_runs:
                runs[slug] = slug_runs
            else:
                logger.debug(f"Dropped '{slug}': no run of {config.min_run} frames")
        return ObjectFrameIndex(runs=runs), mapping

