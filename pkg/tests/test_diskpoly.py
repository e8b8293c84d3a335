"""Exact disk-polygon kernel: degenerate flags, areas, boundary structure."""

import math

import numpy as np
import pytest

from curvball.diskpoly import ArcPolygon, arc_polygon_area, disk_polygon, lens_area
from curvball.geometry import Ball, ModelError, Space
from curvball.measure import RngSpec, estimate_volume
from curvball.oracles import BallIntersection

E2 = Space.euclidean(2)


def random_instance(rng, n):
    """Centers close enough that the unit-radius intersection has interior."""
    while True:
        centers = rng.uniform(-0.5, 0.5, size=(n, 2))
        poly = disk_polygon(centers, 1.0)
        if poly.degenerate is None:
            return centers, poly


class TestLensArea:
    def test_frozen_unit_case(self):
        # two unit disks one unit apart: 2 pi/3 - sqrt(3)/2
        assert lens_area(1.0, 1.0) == pytest.approx(1.2283696986087567, rel=1e-15)

    def test_limits(self):
        assert lens_area(0.0, 2.0) == pytest.approx(4.0 * math.pi, rel=1e-15)
        assert lens_area(4.0, 2.0) == 0.0

    def test_domain(self):
        with pytest.raises(ModelError):
            lens_area(2.1, 1.0)
        with pytest.raises(ModelError):
            lens_area(-0.1, 1.0)
        with pytest.raises(ModelError):
            lens_area(1.0, 0.0)


class TestDegenerateFlags:
    def test_single_disk(self):
        poly = disk_polygon([[0.3, -0.2]], 0.7)
        assert poly.degenerate == "full-disk"
        assert arc_polygon_area(poly) == pytest.approx(math.pi * 0.49, rel=1e-15)

    def test_duplicate_centers_collapse(self):
        poly = disk_polygon([[0.0, 0.0], [0.0, 0.0]], 1.0)
        assert poly.degenerate == "full-disk"

    def test_far_pair_empty(self):
        poly = disk_polygon([[0.0, 0.0], [3.0, 0.0]], 1.0)
        assert poly.degenerate == "empty"
        assert arc_polygon_area(poly) == 0.0

    def test_triple_empty_despite_pairwise_overlap(self):
        # side 1.9 < 2 so every pair meets, yet the circumradius
        # 1.9/sqrt(3) > 1 leaves no common point
        s = 1.9
        centers = [[0.0, 0.0], [s, 0.0], [s / 2, s * math.sqrt(3) / 2]]
        poly = disk_polygon(centers, 1.0)
        assert poly.degenerate == "empty"

    def test_tangent_pair_is_point(self):
        poly = disk_polygon([[0.0, 0.0], [2.0, 0.0]], 1.0)
        assert poly.degenerate == "point"
        assert np.allclose(poly.witness, [1.0, 0.0], atol=1e-9)
        assert arc_polygon_area(poly) == 0.0

    def test_triple_point_at_circumcenter(self):
        # equilateral side sqrt(3) has circumradius exactly 1
        s = math.sqrt(3.0)
        centers = np.array([[0.0, 0.0], [s, 0.0], [s / 2, s * math.sqrt(3) / 2]])
        poly = disk_polygon(centers, 1.0)
        assert poly.degenerate == "point"
        assert np.allclose(poly.witness, centers.mean(axis=0), atol=1e-6)


class TestKnownRegions:
    def test_two_disk_region_matches_lens_formula(self):
        for delta in [0.2, 0.8, 1.0, 1.5, 1.95]:
            poly = disk_polygon([[0.0, 0.0], [delta, 0.0]], 1.0)
            assert poly.degenerate is None
            assert len(poly.arcs) == 2
            assert arc_polygon_area(poly) == pytest.approx(
                lens_area(delta, 1.0), rel=1e-12
            )

    def test_unit_lens_vertices(self):
        poly = disk_polygon([[0.0, 0.0], [1.0, 0.0]], 1.0)
        got = sorted(map(tuple, np.round(poly.vertices, 9)))
        h = math.sqrt(3.0) / 2.0
        want = sorted([(0.5, -round(h, 9)), (0.5, round(h, 9))])
        assert np.allclose(got, want, atol=1e-9)

    def test_reuleaux_triangle(self):
        # three unit disks on an equilateral triangle of side 1: the corners
        # are the centers themselves and the area is (pi - sqrt(3)) / 2
        centers = np.array(
            [[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]]
        )
        poly = disk_polygon(centers, 1.0)
        assert poly.degenerate is None
        assert len(poly.arcs) == 3
        got = sorted(map(tuple, np.round(poly.vertices, 9)))
        want = sorted(map(tuple, np.round(centers, 9)))
        assert np.allclose(got, want, atol=1e-9)
        assert arc_polygon_area(poly) == pytest.approx(
            (math.pi - math.sqrt(3.0)) / 2.0, rel=1e-12
        )

    def test_redundant_disk_changes_nothing(self):
        # the middle disk contains the lens of the outer two, so it must be
        # filtered out as inactive
        lens = disk_polygon([[0.0, 0.0], [1.0, 0.0]], 1.0)
        padded = disk_polygon([[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]], 1.0)
        assert len(padded.arcs) == 2
        assert {a[0] for a in padded.arcs} == {0, 1}
        assert arc_polygon_area(padded) == pytest.approx(
            arc_polygon_area(lens), rel=1e-12
        )


class TestBoundaryStructure:
    def test_arcs_chain_and_vertices_lie_on_two_circles(self):
        rng = np.random.default_rng(52)
        for n in [2, 3, 4, 5, 6]:
            centers, poly = random_instance(rng, n)
            k = len(poly.arcs)
            assert len(poly.vertices) == k
            for idx, (i, ts, te) in enumerate(poly.arcs):
                assert 0.0 <= te - ts <= math.pi + 1e-9
                p_end = poly.centers[i] + np.array([math.cos(te), math.sin(te)])
                j, ns, _ = poly.arcs[(idx + 1) % k]
                p_next = poly.centers[j] + np.array([math.cos(ns), math.sin(ns)])
                assert np.linalg.norm(p_end - p_next) <= 1e-9
            dists = np.linalg.norm(
                poly.vertices[:, None, :] - poly.centers[None, :, :], axis=2
            )
            assert np.all(dists <= 1.0 + 1e-9)
            assert np.all((np.abs(dists - 1.0) <= 1e-9).sum(axis=1) >= 2)

    def test_vertices_inside_every_disk(self):
        rng = np.random.default_rng(53)
        for n in [3, 4, 5]:
            centers, poly = random_instance(rng, n)
            dists = np.linalg.norm(
                poly.vertices[:, None, :] - centers[None, :, :], axis=2
            )
            assert np.all(dists <= 1.0 + 1e-9)

    def test_area_shrinks_as_disks_accumulate(self):
        rng = np.random.default_rng(54)
        centers, _ = random_instance(rng, 6)
        areas = [
            arc_polygon_area(disk_polygon(centers[:m], 1.0)) for m in range(1, 7)
        ]
        for a, b in zip(areas, areas[1:]):
            assert b <= a + 1e-12

    def test_input_validation(self):
        with pytest.raises(ModelError):
            disk_polygon([[0.0, 0.0, 0.0]], 1.0)
        with pytest.raises(ModelError):
            disk_polygon([[0.0, 0.0]], -1.0)


class TestAgainstMonteCarlo:
    def test_random_instances_within_four_sigma(self):
        rng = np.random.default_rng(55)
        for trial in range(3):
            centers, poly = random_instance(rng, 4)
            exact = arc_polygon_area(poly)
            oracle = BallIntersection(
                E2, [Ball(np.asarray(c), 1.0) for c in centers]
            )
            est = estimate_volume(
                oracle, Ball(np.asarray(centers[0]), 1.0), 200_000,
                RngSpec(900 + trial),
            )
            assert abs(est.value - exact) <= 4.0 * est.std_err + 1e-12
