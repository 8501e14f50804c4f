import random
from pathlib import Path

import numpy as np
from pydantic import ValidationError as PydanticValidationError
import pytest

from apps.bundles.schemas import FeaturePoint, InstanceKey, SceneBundle
from apps.connectivity.schemas import CandidateEdge, ComponentDraft, ConnectivityConfig, MaskNode, MergeOutcome
from apps.connectivity.services import ConnectivityService, crop_ref
from apps.connectivity.union_find import ConstrainedUnionFind
from apps.core.exceptions import InvalidArgumentError
from apps.geometry.schemas import Point3, VoxelKeySet

from .fixtures import boxes3
from .oracles import all_pairs_edges

ORIGIN = Point3(0.0, 0.0, 0.0)


def _node(node_id: int, slug: str, voxels, embedding=(1.0, 0.0), seq: int = 0, track: int = 0) -> MaskNode:
    return MaskNode(
        node_id=node_id,
        key=InstanceKey(slug, seq, track),
        points=frozenset(),
        voxels=VoxelKeySet(cell_size=0.5, origin=ORIGIN, keys=frozenset(voxels)),
        embedding=tuple(embedding),
        best_view=0,
    )


def _cells(*xs: int) -> set[tuple[int, int, int]]:
    return {(x, 0, 0) for x in xs}


@pytest.mark.unit
class TestConstrainedUnionFind:
    def test_refuses_shared_keys(self):
        uf = ConstrainedUnionFind([0, 1, 2], {0: ["a"], 1: ["b"], 2: ["a"]})
        assert uf.union(0, 1)
        assert not uf.union(1, 2)
        assert uf.conflicts(0, 2)
        assert uf.groups() == [[0, 1], [2]]

    def test_root_is_smallest_member(self):
        uf = ConstrainedUnionFind([3, 1, 2], {})
        uf.union(3, 2)
        uf.union(2, 1)
        assert uf.find(3) == 1

    def test_already_joined(self):
        uf = ConstrainedUnionFind([0, 1], {})
        assert uf.union(0, 1)
        assert not uf.union(1, 0)


@pytest.mark.unit
class TestComputeEdges:
    """Jaccard edges with the semantic guard."""

    def test_threshold_and_order(self):
        nodes = [
            _node(0, "a", _cells(0, 1, 2, 3)),
            _node(1, "b", _cells(0, 1, 2, 3)),
            _node(2, "c", _cells(3, 4, 5, 6)),
            _node(3, "d", _cells(9)),
        ]
        edges = ConnectivityService.compute_edges(nodes, ConnectivityConfig(tau=0.1))
        assert edges == [CandidateEdge(0, 1, 1.0), CandidateEdge(0, 2, 1 / 7), CandidateEdge(1, 2, 1 / 7)]

        strict = ConnectivityService.compute_edges(nodes, ConnectivityConfig(tau=0.25))
        assert strict == [CandidateEdge(0, 1, 1.0)]

    def test_guard_blocks_orthogonal_embeddings(self):
        nodes = [
            _node(0, "chair", _cells(0, 1), embedding=(1.0, 0.0)),
            _node(1, "chair", _cells(0, 1), embedding=(0.0, 1.0), seq=1),
        ]
        assert ConnectivityService.compute_edges(nodes, ConnectivityConfig()) == []

    def test_guard_allows_similar_embeddings(self):
        angle = np.arccos(0.3)  # cosine distance 0.7 < 0.8
        nodes = [
            _node(0, "chair", _cells(0, 1), embedding=(1.0, 0.0)),
            _node(1, "chair", _cells(0, 1), embedding=(np.cos(angle), np.sin(angle)), seq=1),
        ]
        assert ConnectivityService.compute_edges(nodes, ConnectivityConfig()) == [CandidateEdge(0, 1, 1.0)]

    def test_fewer_than_two_nodes(self):
        assert ConnectivityService.compute_edges([_node(0, "a", _cells(0))], ConnectivityConfig()) == []

    def test_mixed_grids_rejected(self):
        other = MaskNode(
            node_id=1,
            key=InstanceKey("b", 0, 0),
            points=frozenset(),
            voxels=VoxelKeySet(cell_size=1.0, origin=ORIGIN, keys=frozenset(_cells(0))),
            embedding=(1.0, 0.0),
            best_view=0,
        )
        with pytest.raises(InvalidArgumentError):
            ConnectivityService.compute_edges([_node(0, "a", _cells(0)), other], ConnectivityConfig())

    def test_matches_all_pairs_reference(self):
        rng = np.random.default_rng(11)
        directions = np.eye(3)
        nodes = []
        for node_id in range(50):
            start = int(rng.integers(0, 30))
            width = int(rng.integers(1, 6))
            vector = directions[node_id % 3] + rng.normal(scale=0.4, size=3)
            vector /= np.linalg.norm(vector)
            cells = _cells(*range(start, start + width))
            nodes.append(_node(node_id, f"s{node_id % 7}", cells, embedding=vector.tolist()))
        config = ConnectivityConfig()

        edges = ConnectivityService.compute_edges(nodes, config)
        expected = all_pairs_edges(nodes, config.tau, config.guard_cos_dist)
        assert [(e.a, e.b) for e in edges] == [(a, b) for a, b, _ in expected]
        assert [e.jaccard for e in edges] == pytest.approx([j for _, _, j in expected], abs=1e-12)


@pytest.mark.unit
class TestMergeConstrained:
    def test_duplicate_sequence_key_rejected(self):
        nodes = [
            _node(0, "chair", _cells(0)),
            _node(1, "sofa", _cells(0)),
            _node(2, "chair", _cells(0), track=1),
        ]
        edges = [CandidateEdge(0, 1, 0.9), CandidateEdge(1, 2, 0.8)]
        drafts, log = ConnectivityService.merge_constrained(nodes, edges)
        assert [d.outcome for d in log] == [MergeOutcome.APPLIED, MergeOutcome.REJECTED]
        assert [sorted(d.members) for d in drafts] == [[0, 1], [2]]

    def test_redundant_edges_logged(self):
        nodes = [_node(i, f"s{i}", _cells(0)) for i in range(3)]
        edges = [CandidateEdge(0, 1, 0.9), CandidateEdge(1, 2, 0.8), CandidateEdge(0, 2, 0.7)]
        drafts, log = ConnectivityService.merge_constrained(nodes, edges)
        assert [d.outcome for d in log] == [MergeOutcome.APPLIED, MergeOutcome.APPLIED, MergeOutcome.REDUNDANT]
        assert len(drafts) == 1

    def test_randomized_instances_respect_constraint(self):
        rng = random.Random(2024)
        for _ in range(500):
            n = rng.randint(2, 12)
            nodes = [_node(i, rng.choice("abc"), _cells(0), seq=rng.randint(0, 1), track=i) for i in range(n)]
            edges = sorted(
                (CandidateEdge(a, b, rng.random()) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.5),
                key=lambda e: (-e.jaccard, e.a, e.b),
            )
            drafts, log = ConnectivityService.merge_constrained(nodes, edges)

            keys = {node.node_id: node.key.sequence_key for node in nodes}
            for draft in drafts:
                members = [keys[m] for m in draft.members]
                assert len(members) == len(set(members))
            applied = [d.edge.jaccard for d in log if d.outcome == MergeOutcome.APPLIED]
            assert applied == sorted(applied, reverse=True)
            assert sorted(m for d in drafts for m in d.members) == list(range(n))


@pytest.mark.unit
class TestCleanComponents:
    def _bundle(self, positions) -> SceneBundle:
        points = tuple(FeaturePoint(point_id=i, position=Point3.of(p)) for i, p in enumerate(positions))
        return SceneBundle(root=Path("."), frames=(), masks=(), points=points)

    def test_drops_small_components(self):
        cube = boxes3.cube_surface((0.0, 0.0, 0.0))
        patch = [(5.0 + 0.05 * i, 0.0, 0.0) for i in range(19)]
        bundle = self._bundle([*cube, *patch])
        big = ComponentDraft(members=frozenset({0}), points=frozenset(range(len(cube))))
        small = ComponentDraft(members=frozenset({1}), points=frozenset(range(len(cube), len(cube) + 19)))
        cleaned = ConnectivityService.clean_components([big, small], bundle, ConnectivityConfig())
        assert cleaned == [big]

    def test_removes_noise_points(self):
        cube = boxes3.cube_surface((0.0, 0.0, 0.0))
        bundle = self._bundle([*cube, (3.0, 3.0, 3.0)])
        draft = ComponentDraft(members=frozenset({0}), points=frozenset(range(len(cube) + 1)))
        (cleaned,) = ConnectivityService.clean_components([draft], bundle, ConnectivityConfig())
        assert cleaned.points == frozenset(range(len(cube)))

    def test_component_of_only_noise_is_dropped(self):
        bundle = self._bundle([(0.0, 0.0, 0.0), (2.0, 0.0, 0.0), (4.0, 0.0, 0.0)])
        draft = ComponentDraft(members=frozenset({0}), points=frozenset({0, 1, 2}))
        assert ConnectivityService.clean_components([draft], bundle, ConnectivityConfig(min_points=1)) == []

    def test_min_points_must_keep_something(self):
        with pytest.raises(PydanticValidationError):
            ConnectivityConfig(min_points=0)


@pytest.mark.unit
class TestViews:
    def test_best_view_prefers_most_points_then_lowest_frame(self):
        frame_points = {4: frozenset({1, 2}), 2: frozenset({3, 4}), 7: frozenset({1})}
        assert ConnectivityService.best_view(frame_points) == 2
        assert ConnectivityService.best_view({}) is None

    def test_rank_views_unions_member_boxes(self):
        a = MaskNode(
            node_id=0,
            key=InstanceKey("a", 0, 0),
            points=frozenset({1, 2, 3}),
            voxels=VoxelKeySet(0.5, ORIGIN),
            embedding=(1.0,),
            best_view=0,
            frame_points={0: frozenset({1, 2}), 1: frozenset({3})},
            mask_boxes={0: (0, 0, 4, 4), 1: (0, 0, 2, 2)},
        )
        b = MaskNode(
            node_id=1,
            key=InstanceKey("b", 0, 0),
            points=frozenset({4}),
            voxels=VoxelKeySet(0.5, ORIGIN),
            embedding=(1.0,),
            best_view=1,
            frame_points={1: frozenset({4})},
            mask_boxes={1: (10, 10, 12, 12)},
        )
        draft = ComponentDraft(members=frozenset({0, 1}), points=frozenset({1, 2, 3, 4}))
        views = ConnectivityService.rank_views(draft, {0: a, 1: b}, k=3)
        assert views == [(0, 2, (0, 0, 4, 4)), (1, 2, (0, 0, 12, 12))]

    def test_crop_ref_layout(self):
        assert crop_ref(4, 1, 17) == "crops/component_4/view_1_frame_17.png"
