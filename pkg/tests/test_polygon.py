"""Polygon representations, conversions and scalar functionals."""

import math

import numpy as np
import pytest

from polygonlab import errors
from polygonlab.polygon import (
    ManifoldPoint,
    batch_metrics,
    central_coordinates,
    from_vertices,
    side_lengths,
    star_point,
    summary,
    summary_of_vertices,
    to_manifold_point,
    to_vertices,
)

RECT = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]


def rect_angle_oracle():
    """Central angles of the 2x1 rectangle by direct atan2 arithmetic at the
    barycenter (1, 0.5), independent of the library code."""
    rel = [(px - 1.0, py - 0.5) for px, py in RECT]
    out = []
    for i in range(4):
        ux, uy = rel[i]
        vx, vy = rel[(i + 1) % 4]
        out.append(math.atan2(ux * vy - uy * vx, ux * vx + uy * vy))
    return out


class TestFromVertices:
    def test_rectangle_ccw(self):
        P = from_vertices(RECT)
        assert P.n == 4 and P.convex
        assert P.signed_area() > 0

    def test_clockwise_input_reversed(self):
        P = from_vertices([(0, 0), (0, 1), (2, 1), (2, 0)])
        assert P.signed_area() > 0
        assert np.allclose(sorted(map(tuple, P.vertices)), sorted(RECT))

    def test_too_few(self):
        with pytest.raises(errors.TooFewVertices):
            from_vertices([(0, 0), (1, 0)])

    def test_duplicate_consecutive(self):
        with pytest.raises(errors.DuplicateConsecutiveVertex):
            from_vertices([(0, 0), (0, 0), (1, 1), (0, 1)])

    def test_zero_area(self):
        with pytest.raises(errors.DegenerateZeroArea):
            from_vertices([(0, 0), (1, 1), (2, 2)])


class TestConversions:
    def test_regular_pentagon_is_fixed_point(self):
        n = 5
        pts = [(math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)) for k in range(n)]
        m, scale = to_manifold_point(from_vertices(pts))
        assert scale == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(m.x, 2 * math.pi / n, atol=1e-12)
        assert np.allclose(m.r, 1.0, atol=1e-12)

    def test_rectangle_manifold_image(self):
        m, scale = to_manifold_point(from_vertices(RECT))
        # raw radii are all sqrt(1.25); normalization sends them to 1
        assert scale == pytest.approx(4.0 / (4.0 * math.sqrt(1.25)), rel=1e-15)
        assert np.allclose(m.r, 1.0, atol=1e-12)
        assert np.allclose(np.sort(m.x), np.sort(rect_angle_oracle()), atol=1e-12)
        assert m.x.sum() == pytest.approx(2 * math.pi, abs=1e-12)

    def test_barycenter_outside_l_shape(self):
        # vertex barycenter of this L-shape is (5/3, 4/3), outside the region
        L = from_vertices([(0, 0), (4, 0), (4, 1), (1, 1), (1, 3), (0, 3)])
        with pytest.raises(errors.BarycenterOutside):
            to_manifold_point(L)

    def test_barycenter_outside_found_by_search(self):
        # brute-force search over random star-shaped perturbations for a
        # polygon whose vertex barycenter leaves the interior
        rng = np.random.default_rng(5)
        found = 0
        for _ in range(500):
            ang = np.sort(rng.uniform(0, 2 * math.pi, size=7))
            if np.min(np.diff(ang)) < 1e-3:
                continue
            rad = rng.uniform(0.05, 1.0, size=7)
            P = from_vertices(np.column_stack([rad * np.cos(ang), rad * np.sin(ang)]))
            try:
                to_manifold_point(P)
            except (errors.BarycenterOutside, errors.ZeroRadius):
                found += 1
        assert found > 0

    def test_star_point_vertices_n4(self):
        P = to_vertices(star_point(4))
        expect = [(1, 0), (0, 1), (-1, 0), (0, -1)]
        assert np.allclose(P.vertices, expect, atol=1e-12)

    def test_star_point_vertices_n3(self):
        P = to_vertices(star_point(3))
        assert np.allclose(np.linalg.norm(P.vertices, axis=1), 1.0, atol=1e-12)
        assert np.allclose(P.side_lengths(), math.sqrt(3.0), atol=1e-12)

    @pytest.mark.parametrize("n", [3, 5, 9])
    def test_roundtrip(self, n):
        from polygonlab.manifold import sample

        m = sample(n, seed=n)
        P = to_vertices(m)
        assert np.linalg.norm(P.barycenter()) < 1e-9
        m2, scale = to_manifold_point(P)
        assert scale == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(m2.x, m.x, atol=1e-9)
        assert np.allclose(m2.r, m.r, atol=1e-9)


class TestManifoldPointValidation:
    def test_bad_angle_sum(self):
        n = 4
        with pytest.raises(errors.InvalidManifoldPoint):
            ManifoldPoint(x=np.full(n, 1.0), r=np.ones(n))

    def test_zero_radius(self):
        z = star_point(4)
        with pytest.raises(errors.ZeroRadius):
            ManifoldPoint(x=z.x, r=np.array([0.0, 2.0, 1.0, 1.0]))


class TestSideLengths:
    def test_square(self):
        assert np.allclose(side_lengths(star_point(4)), math.sqrt(2.0), atol=1e-12)

    def test_hexagon(self):
        assert np.allclose(side_lengths(star_point(6)), 1.0, atol=1e-12)

    def test_rectangle_proportions(self):
        m, scale = to_manifold_point(from_vertices(RECT))
        # manifold sides are the vertex-space sides (2,1,2,1) times the scale
        got = np.sort(side_lengths(m))
        assert np.allclose(got, np.sort(np.array([2, 1, 2, 1]) * scale), atol=1e-12)

    @pytest.mark.parametrize("n", [4, 7, 11])
    def test_matches_vertex_distances(self, n):
        from polygonlab.manifold import sample

        m = sample(n, seed=100 + n)
        assert np.allclose(side_lengths(m), to_vertices(m).side_lengths(), atol=1e-12)


class TestSummary:
    @pytest.mark.parametrize("n", range(3, 13))
    def test_regular_polygon_equality_case(self, n):
        s = summary(star_point(n))
        assert abs(s.deficit) <= 1e-12
        assert s.side_variance <= 1e-12 and s.radius_variance <= 1e-12
        assert s.angle_variance <= 1e-12 and s.phi <= 1e-12
        assert s.area == pytest.approx(0.5 * n * math.sin(2 * math.pi / n), abs=1e-12)

    def test_rectangle_values(self):
        s = summary_of_vertices(from_vertices(RECT))
        assert s.perimeter == pytest.approx(6.0, abs=1e-12)
        assert s.area == pytest.approx(2.0, abs=1e-12)
        assert s.side_square_sum == pytest.approx(10.0, abs=1e-12)
        assert s.deficit == pytest.approx(36.0 - 16.0 * math.tan(math.pi / 4) * 2.0, abs=1e-9)
        assert s.side_variance == pytest.approx(0.25, abs=1e-12)
        assert s.radius_variance == pytest.approx(0.0, abs=1e-12)
        # oracle: population variance of the atan2 angles at the barycenter
        ang = rect_angle_oracle()
        mean = sum(ang) / 4.0
        var = sum((a - mean) ** 2 for a in ang) / 4.0
        assert s.angle_variance == pytest.approx(var, abs=1e-12)

    def test_variance_identity_on_samples(self):
        from polygonlab.manifold import sample_batch

        X, R = sample_batch(6, 500, seed=2)
        met = batch_metrics(X, R)
        lhs = 36.0 * met["side_variance"]
        rhs = 6.0 * met["side_square_sum"] - met["perimeter"] ** 2
        assert np.all(np.abs(lhs - rhs) <= 1e-9 * np.maximum(1.0, np.abs(rhs)))

    def test_nonpositive_area_rejected(self):
        from polygonlab.polygon import summary_xr

        # angles sum to 2 pi but the reflex term dominates the signed area
        with pytest.raises(errors.NonpositiveArea):
            summary_xr(np.array([3.5, 2.0, 2 * math.pi - 5.5]), np.array([3.0, 3.0, 0.1]))


class TestScalingLaws:
    @pytest.mark.parametrize("alpha", [0.5, 2.0, 10.0])
    def test_dilation(self, alpha):
        from polygonlab.polygon import summary_xr

        x, r = central_coordinates(from_vertices(RECT))
        base = summary_xr(x, r)
        scaled = summary_xr(x, alpha * r)
        assert scaled.deficit == pytest.approx(alpha ** 2 * base.deficit, rel=1e-12)
        assert scaled.radius_variance == pytest.approx(alpha ** 2 * base.radius_variance, abs=1e-12)
        assert scaled.angle_variance == pytest.approx(base.angle_variance, rel=1e-12)
        assert scaled.area == pytest.approx(alpha ** 2 * base.area, rel=1e-12)


def test_deficit_zero_only_at_regular_point():
    from polygonlab.manifold import sample_convex_batch

    n = 6
    X, R = sample_convex_batch(n, 2000, seed=9)
    met = batch_metrics(X, R)
    z0 = np.concatenate([np.full(n, 2 * math.pi / n), np.ones(n)])
    Z = np.concatenate([X, R], axis=1)
    dist = np.max(np.abs(Z - z0), axis=1)
    away = dist > 1e-3
    assert np.all(met["deficit"][away] > 0.0)
