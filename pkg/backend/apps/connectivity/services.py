"""
Component graph: nodes, Jaccard edges with a semantic guard, constrained merging,
cleaning and finalization into scene memory components.
"""

import logging
from collections import defaultdict
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import sparse

from apps.association.schemas import InstancePoints
from apps.bundles.schemas import SceneBundle
from apps.core.exceptions import ClientError, InvalidArgumentError
from apps.core.retry import call_with_retries
from apps.geometry.services import NOISE, GeometryService
from apps.memory.schemas import Component
from libs.modelsdk.contracts import CaptionRequest, CaptioningClient, EmbeddingClient, ImageCropRequest

from .schemas import (
    CandidateEdge,
    ComponentDraft,
    ConnectivityConfig,
    MaskNode,
    MergeDecision,
    MergeOutcome,
)
from .union_find import ConstrainedUnionFind

logger = logging.getLogger(__name__)


def crop_ref(component_id: int, rank: int, frame_id: int) -> str:
    return f"crops/component_{component_id}/view_{rank}_frame_{frame_id}.png"


class ConnectivityService:
    """Turns associated instances into persistent components."""

    # =========================================================================
    # NODES AND EDGES
    # =========================================================================

    @staticmethod
    def best_view(frame_points: dict[int, frozenset[int]]) -> int | None:
        """Frame with the most visible points; ties go to the lowest frame_id."""
        if not frame_points:
            return None
        return min(frame_points, key=lambda f: (-len(frame_points[f]), f))

    @classmethod
    def build_nodes(
        cls,
        instances: Sequence[InstancePoints],
        bundle: SceneBundle,
        embedder: EmbeddingClient,
        config: ConnectivityConfig | None = None,
    ) -> tuple[list[MaskNode], list[str]]:
        """One node per instance with a visible frame, embedded on its best-view crop."""
        config = config or ConnectivityConfig.from_settings()
        warnings: list[str] = []
        pending: list[tuple[InstancePoints, int]] = []
        for instance in instances:
            view = cls.best_view(instance.frame_points)
            if view is None or view not in instance.mask_boxes:
                warnings.append(f"skipped node {instance.key.label()}: no visible frame")
                continue
            pending.append((instance, view))

        requests = [
            ImageCropRequest(
                image_ref=bundle.frames_by_id[view].image_ref,
                image_path=str(bundle.image_path(view)),
                box=instance.mask_boxes[view],
                label=instance.key.object_slug,
            )
            for instance, view in pending
        ]
        vectors = (
            call_with_retries(
                lambda: embedder.embed_images(requests),
                attempts=config.client_attempts,
                backoff_base=config.backoff_base,
                what="crop embedding",
            )
            if requests
            else []
        )

        nodes = []
        for node_id, ((instance, view), vector) in enumerate(zip(pending, vectors)):
            embedding = np.asarray(vector, dtype=np.float64)
            norm = np.linalg.norm(embedding)
            if norm > 0:
                embedding = embedding / norm
            nodes.append(
                MaskNode(
                    node_id=node_id,
                    key=instance.key,
                    points=instance.point_ids,
                    voxels=GeometryService.voxelize(
                        bundle.positions_of(instance.point_ids), config.voxel_cell, bundle.voxel_origin
                    ),
                    embedding=tuple(embedding.tolist()),
                    best_view=view,
                    frame_points=instance.frame_points,
                    mask_boxes=instance.mask_boxes,
                )
            )
        for warning in warnings:
            logger.warning(warning)
        return nodes, warnings

    @staticmethod
    def incidence_matrix(nodes: Sequence[MaskNode]) -> sparse.csr_matrix:
        """Binary node x voxel matrix over the sorted voxel vocabulary."""
        vocabulary = {key: col for col, key in enumerate(sorted(set().union(*(n.voxels.keys for n in nodes))))}
        rows, cols = [], []
        for row, node in enumerate(nodes):
            for key in node.voxels.keys:
                rows.append(row)
                cols.append(vocabulary[key])
        data = np.ones(len(rows), dtype=np.int64)
        return sparse.csr_matrix((data, (rows, cols)), shape=(len(nodes), len(vocabulary)))

    @classmethod
    def compute_edges(cls, nodes: Sequence[MaskNode], config: ConnectivityConfig | None = None) -> list[CandidateEdge]:
        """Pairs with Jaccard >= tau whose embeddings pass the cosine guard.

        Ordered by Jaccard descending, then ``(a, b)`` ascending.
        """
        config = config or ConnectivityConfig.from_settings()
        if len(nodes) < 2:
            return []
        if any(not n.voxels.same_grid(nodes[0].voxels) for n in nodes):
            raise InvalidArgumentError("nodes were voxelized on different grids")

        incidence = cls.incidence_matrix(nodes)
        overlap = sparse.triu(incidence @ incidence.T, k=1).tocoo()
        sizes = np.asarray(incidence.sum(axis=1)).ravel()
        embeddings = np.asarray([n.embedding for n in nodes], dtype=np.float64)

        edges = []
        for i, j, inter in zip(overlap.row.tolist(), overlap.col.tolist(), overlap.data.tolist()):
            jaccard = inter / (int(sizes[i]) + int(sizes[j]) - inter)
            if jaccard < config.tau:
                continue
            if 1.0 - float(embeddings[i] @ embeddings[j]) > config.guard_cos_dist:
                continue
            a, b = sorted((nodes[i].node_id, nodes[j].node_id))
            edges.append(CandidateEdge(a, b, jaccard))
        edges.sort(key=lambda e: (-e.jaccard, e.a, e.b))
        logger.info(f"Computed {len(edges)} candidate edges over {len(nodes)} nodes")
        return edges

    # =========================================================================
    # MERGING AND CLEANING
    # =========================================================================

    @staticmethod
    def merge_constrained(
        nodes: Sequence[MaskNode], edges: Sequence[CandidateEdge]
    ) -> tuple[list[ComponentDraft], list[MergeDecision]]:
        """Union nodes edge by edge, refusing merges that share a (sequence, slug) key."""
        uf = ConstrainedUnionFind(
            (n.node_id for n in nodes),
            {n.node_id: [n.key.sequence_key] for n in nodes},
        )
        log: list[MergeDecision] = []
        for edge in edges:
            if uf.find(edge.a) == uf.find(edge.b):
                log.append(MergeDecision(edge, MergeOutcome.REDUNDANT))
            elif uf.union(edge.a, edge.b):
                log.append(MergeDecision(edge, MergeOutcome.APPLIED))
            else:
                log.append(MergeDecision(edge, MergeOutcome.REJECTED))
                logger.debug(f"Rejected merge {edge.a}-{edge.b} (J={edge.jaccard:.3f}): shared sequence key")

        points = {n.node_id: n.points for n in nodes}
        drafts = [
            ComponentDraft(members=frozenset(group), points=frozenset().union(*(points[m] for m in group)))
            for group in uf.groups()
        ]
        return drafts, log

    @staticmethod
    def clean_components(
        drafts: Sequence[ComponentDraft],
        bundle: SceneBundle,
        config: ConnectivityConfig | None = None,
    ) -> list[ComponentDraft]:
        """Remove DBSCAN noise per component and drop components left too small."""
        config = config or ConnectivityConfig.from_settings()
        cleaned = []
        for draft in drafts:
            ids = sorted(draft.points)
            labels = GeometryService.dbscan(bundle.positions_of(ids), config.clean_params)
            inliers = frozenset(pid for pid, label in zip(ids, labels) if label != NOISE)
            if len(inliers) < config.min_points:
                logger.debug(f"Dropped component anchored at node {draft.anchor}: {len(inliers)} inliers")
                continue
            cleaned.append(ComponentDraft(members=draft.members, points=inliers))
        return cleaned

    # =========================================================================
    # FINALIZATION
    # =========================================================================

    @staticmethod
    def rank_views(
        draft: ComponentDraft, nodes_by_id: dict[int, MaskNode], k: int
    ) -> list[tuple[int, int, tuple[int, int, int, int]]]:
        """Top ``k`` ``(frame_id, visible_count, pixel_box)`` by visible points, ties by frame_id."""
        visible: dict[int, set[int]] = defaultdict(set)
        boxes: dict[int, list[tuple[int, int, int, int]]] = defaultdict(list)
        for member in sorted(draft.members):
            node = nodes_by_id[member]
            for frame_id, seen in node.frame_points.items():
                visible[frame_id] |= seen & draft.points
                if frame_id in node.mask_boxes:
                    boxes[frame_id].append(node.mask_boxes[frame_id])

        ranked = sorted((f for f in visible if visible[f] and boxes[f]), key=lambda f: (-len(visible[f]), f))
        views = []
        for frame_id in ranked[:k]:
            frame_boxes = np.asarray(boxes[frame_id])
            box = (
                int(frame_boxes[:, 0].min()),
                int(frame_boxes[:, 1].min()),
                int(frame_boxes[:, 2].max()),
                int(frame_boxes[:, 3].max()),
            )
            views.append((frame_id, len(visible[frame_id]), box))
        return views

    @staticmethod
    def render_crop(bundle: SceneBundle, frame_id: int, box: tuple[int, int, int, int], target: Path) -> bool:
        source = bundle.image_path(frame_id)
        try:
            with Image.open(source) as image:
                crop = image.convert("RGB").crop(box)
            target.parent.mkdir(parents=True, exist_ok=True)
            crop.save(target, format="PNG")
        except OSError as e:
            logger.warning(f"Could not render crop from {source}: {e}")
            return False
        return True

    @classmethod
    def finalize(
        cls,
        drafts: Sequence[ComponentDraft],
        nodes: Sequence[MaskNode],
        bundle: SceneBundle,
        captioner: CaptioningClient,
        config: ConnectivityConfig | None = None,
        crops_root: Path | None = None,
    ) -> tuple[list[Component], list[str]]:
        """Bound, rank views, render crops and caption each draft.

        Component ids are dense in order of each draft's smallest member node.
        """
        config = config or ConnectivityConfig.from_settings()
        nodes_by_id = {n.node_id: n for n in nodes}
        warnings: list[str] = []
        components = []

        for component_id, draft in enumerate(sorted(drafts, key=lambda d: d.anchor)):
            bbox, centroid = GeometryService.bounds_and_centroid(bundle.positions_of(draft.points))
            refs, image_paths = [], []
            for rank, (frame_id, _count, box) in enumerate(cls.rank_views(draft, nodes_by_id, config.top_k_views)):
                ref = crop_ref(component_id, rank, frame_id)
                refs.append(ref)
                if crops_root is not None and cls.render_crop(bundle, frame_id, box, crops_root / ref):
                    image_paths.append(str(crops_root / ref))
                else:
                    if crops_root is not None:
                        warnings.append(f"component {component_id}: crop {ref} not rendered")
                    image_paths.append(str(bundle.image_path(frame_id)))

            labels = sorted({nodes_by_id[m].key.object_slug for m in draft.members})
            request = CaptionRequest(crop_refs=refs, image_paths=image_paths, labels=labels)
            try:
                caption = call_with_retries(
                    lambda request=request: captioner.caption(request),
                    attempts=config.client_attempts,
                    backoff_base=config.backoff_base,
                    what=f"caption for component {component_id}",
                )
            except ClientError as e:
                warnings.append(f"component {component_id}: caption unavailable ({e.message})")
                caption = ""

            components.append(
                Component(
                    component_id=component_id,
                    centroid=centroid,
                    bbox=bbox,
                    caption=caption.strip(),
                    crop_refs=tuple(refs),
                )
            )
        for warning in warnings:
            logger.warning(warning)
        return components, warnings
