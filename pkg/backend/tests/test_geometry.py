import math

import numpy as np
import pytest

from apps.core.exceptions import EmptyGeometryError, InvalidArgumentError
from apps.geometry.schemas import Aabb3, DbscanParams, Point3
from apps.geometry.services import NOISE, GeometryService

from .oracles import brute_dbscan, same_partition


@pytest.mark.unit
class TestDbscan:
    """Density clustering against hand cases and the O(n^2) reference."""

    def test_two_tight_groups_and_a_stray(self):
        points = [(0, 0, 0), (0.1, 0, 0), (0, 0.1, 0), (5, 5, 5), (5.1, 5, 5), (5, 5.1, 5), (20, 20, 20)]
        labels = GeometryService.dbscan(points, DbscanParams(eps=0.2, min_samples=3))
        assert labels == [0, 0, 0, 1, 1, 1, NOISE]

    def test_point_counts_toward_its_own_neighborhood(self):
        """A lone point is a cluster when min_samples is 1."""
        assert GeometryService.dbscan([(0, 0, 0)], DbscanParams(eps=0.1, min_samples=1)) == [0]
        assert GeometryService.dbscan([(0, 0, 0)], DbscanParams(eps=0.1, min_samples=2)) == [NOISE]

    def test_empty_input(self):
        assert GeometryService.dbscan([], DbscanParams(eps=1.0, min_samples=1)) == []

    def test_border_point_joins_cluster(self):
        points = [(0, 0, 0), (0.1, 0, 0), (0.2, 0, 0), (0.3, 0, 0)]
        labels = GeometryService.dbscan(points, DbscanParams(eps=0.15, min_samples=3))
        assert labels == [0, 0, 0, 0]

    def test_clusters_numbered_by_first_core_point(self):
        points = [(10, 0, 0), (10.05, 0, 0), (0, 0, 0), (0.05, 0, 0)]
        labels = GeometryService.dbscan(points, DbscanParams(eps=0.1, min_samples=2))
        assert labels == [0, 0, 1, 1]

    def test_matches_reference_on_random_points(self):
        rng = np.random.default_rng(7)
        centers = rng.uniform(0, 10, size=(5, 3))
        points = np.concatenate([c + rng.normal(scale=0.3, size=(30, 3)) for c in centers])
        points = np.concatenate([points, rng.uniform(0, 10, size=(50, 3))])
        params = DbscanParams(eps=0.5, min_samples=5)

        labels = GeometryService.dbscan(points, params)
        expected = brute_dbscan(points, params.eps, params.min_samples)
        assert len(points) == 200
        assert same_partition(labels, expected)

    def test_rejects_non_finite_points(self):
        with pytest.raises(InvalidArgumentError):
            GeometryService.dbscan([(0, 0, math.nan)], DbscanParams(eps=1.0, min_samples=1))

    def test_params_validated(self):
        with pytest.raises(ValueError):
            DbscanParams(eps=0, min_samples=1)
        with pytest.raises(ValueError):
            DbscanParams(eps=1.0, min_samples=0)


@pytest.mark.unit
class TestVoxelsAndJaccard:
    def test_voxelize_floors_relative_to_origin(self):
        voxels = GeometryService.voxelize([(0.1, 0.1, 0.1), (0.4, 0.2, 0.0), (0.6, 0.0, 0.0)], 0.5)
        assert voxels.keys == frozenset({(0, 0, 0), (1, 0, 0)})

        shifted = GeometryService.voxelize([(0.1, 0.1, 0.1)], 0.5, Point3(0.2, 0.0, 0.0))
        assert shifted.keys == frozenset({(-1, 0, 0)})

    def test_voxelize_rejects_bad_cell(self):
        with pytest.raises(InvalidArgumentError):
            GeometryService.voxelize([(0, 0, 0)], 0.0)

    def test_jaccard_half_overlap(self):
        a = GeometryService.voxelize([(1.5, 0, 0), (2.5, 0, 0), (3.5, 0, 0)], 1.0)
        b = GeometryService.voxelize([(2.5, 0, 0), (3.5, 0, 0), (4.5, 0, 0)], 1.0)
        assert GeometryService.jaccard(a, b) == 0.5

    def test_jaccard_empty_sets(self):
        empty = GeometryService.voxelize([], 1.0)
        assert GeometryService.jaccard(empty, empty) == 0.0

    def test_jaccard_requires_same_grid(self):
        a = GeometryService.voxelize([(0, 0, 0)], 1.0)
        b = GeometryService.voxelize([(0, 0, 0)], 0.5)
        with pytest.raises(InvalidArgumentError):
            GeometryService.jaccard(a, b)


@pytest.mark.unit
class TestBounds:
    def test_box_and_mean_centroid(self):
        bbox, centroid = GeometryService.bounds_and_centroid([(0, 0, 0), (2, 0, 0), (0, 4, 2), (2, 4, 2)])
        assert bbox == Aabb3(Point3(0, 0, 0), Point3(2, 4, 2))
        assert centroid == Point3(1.0, 2.0, 1.0)
        assert bbox.contains(centroid)

    def test_single_point(self):
        bbox, centroid = GeometryService.bounds_and_centroid([(1, 2, 3)])
        assert bbox.extents == Point3(0, 0, 0)
        assert centroid == Point3(1, 2, 3)

    def test_empty_raises(self):
        with pytest.raises(EmptyGeometryError):
            GeometryService.bounds_and_centroid([])

    def test_flat_round_trip(self):
        box = Aabb3.from_flat([0, 1, 2, 3, 4, 5])
        assert box.flat() == [0, 1, 2, 3, 4, 5]
        with pytest.raises(InvalidArgumentError):
            Aabb3.from_flat([1, 0, 0, 0, 0, 0])
