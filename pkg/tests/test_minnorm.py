"""Exact minimum-norm points: solver, oracle, certificates, index sets."""

from __future__ import annotations

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from higgsstrata import (
    CapExceeded,
    PointCloud,
    hull_contains_origin,
    index_set_B,
    kkt_certificate,
    min_norm_point,
    min_norm_point_by_faces,
)
from higgsstrata.linalg import dot


def random_cloud(rng: random.Random, dim=None, npts=None) -> PointCloud:
    dim = dim or rng.randint(1, 4)
    npts = npts or rng.randint(1, 7)
    pts = [
        [F(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(dim)]
        for _ in range(npts)
    ]
    return PointCloud.from_points(pts)


class TestMinNorm:
    def test_origin_inside(self):
        assert min_norm_point(PointCloud.from_points([[1, 1], [-1, -1]])) == (F(0), F(0))

    def test_segment_projection(self):
        assert min_norm_point(PointCloud.from_points([[1, 0], [0, 1]])) == (
            F(1, 2),
            F(1, 2),
        )

    def test_single_point(self):
        assert min_norm_point(PointCloud.from_points([[2, 3]])) == (F(2), F(3))

    def test_methods_agree_on_examples(self):
        for pts in ([[1, 0], [0, 1]], [[1, 1], [-1, -1]], [[2, 3]], [[1, 2], [3, 1], [-1, 5]]):
            assert min_norm_point(pts, "wolfe") == min_norm_point(pts, "faces")

    def test_oracle_equality_random(self):
        rng = random.Random(11)
        for _ in range(30):
            cloud = random_cloud(rng)
            assert min_norm_point(cloud, "wolfe") == min_norm_point_by_faces(cloud)

    def test_kkt_with_active_support_equality(self):
        rng = random.Random(5)
        for _ in range(20):
            cloud = random_cloud(rng)
            x = min_norm_point(cloud)
            xx = dot(x, x)
            assert all(dot(p, x) >= xx for p in cloud.points)
            # reconstructing x as a convex combination of active points is
            # possible: the minimum over actives alone must agree
            active = [p for p in cloud.points if dot(p, x) == xx]
            assert active
            assert min_norm_point(PointCloud.from_points(active)) == x

    def test_bad_method(self):
        with pytest.raises(ValueError):
            min_norm_point([[1]], method="float")

    @given(st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_kkt_certificate_property(self, seed):
        cloud = random_cloud(random.Random(seed))
        assert kkt_certificate(cloud, min_norm_point(cloud))


class TestHullMembership:
    def test_both_directions_agree(self):
        rng = random.Random(23)
        hits = 0
        for _ in range(40):
            cloud = random_cloud(rng, dim=rng.randint(1, 3), npts=rng.randint(1, 5))
            a = hull_contains_origin(cloud, "minnorm")
            b = hull_contains_origin(cloud, "feasibility")
            assert a == b
            hits += a
        assert 0 < hits < 40  # both outcomes exercised

    def test_known_cases(self):
        assert hull_contains_origin([[1, 1], [-1, -1]])
        assert not hull_contains_origin([[1, 0], [0, 1]])


class TestIndexSet:
    def test_one_dimensional_example(self):
        assert index_set_B([[-1], [1]]) == [(F(0),), (F(1),)]

    def test_repeated_weight(self):
        assert index_set_B([[3, 3], [3, 3], [3, 3]]) == [(F(3), F(3))]

    def test_permuting_identical_weights_invariant(self):
        a = index_set_B([[1, 0], [0, 1], [1, 0]])
        b = index_set_B([[0, 1], [1, 0], [1, 0]])
        assert a == b

    def test_chamber_representatives_sorted(self):
        for v in index_set_B([[2, -1], [-1, 2], [1, 1]]):
            assert list(v) == sorted(v, reverse=True)

    def test_no_chamber_keeps_raw_vectors(self):
        got = index_set_B([[-1], [1]], restrict_to_chamber=False)
        assert got == [(F(-1),), (F(0),), (F(1),)]

    def test_cap(self):
        with pytest.raises(CapExceeded):
            index_set_B([[i, 1] for i in range(12)], cap=100)

    def test_support_size_limit(self):
        weights = [[1, 0], [0, 1], [-1, -1]]
        singles = index_set_B(weights, max_support_size=1)
        full = index_set_B(weights)
        assert set(singles) <= set(full)
        # the origin needs the full support here, so the limit drops it
        assert (F(0), F(0)) in full and (F(0), F(0)) not in singles

    def test_zero_included_iff_origin_in_some_hull(self):
        got = index_set_B([[1, 0], [0, 1]])
        assert (F(0), F(0)) not in got
        got = index_set_B([[1, 0], [-1, 0]])
        assert (F(0), F(0)) in got
