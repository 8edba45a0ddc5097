"""Inequality verification, constant estimation, sharpness and scaling."""

import math

import numpy as np
import pytest

from polygonlab import errors
from polygonlab.lab import (
    Constants,
    estimate_cn,
    rayleigh_bound,
    scaling_check,
    sharpness_probe,
    verify,
    verify_vertices,
)
from polygonlab.manifold import sample, sample_convex_batch, tangent_basis_at_star
from polygonlab.polygon import (
    ManifoldPoint,
    from_vertices,
    star_point,
    summary_of_vertices,
)

RECT = from_vertices([(0, 0), (2, 0), (2, 1), (0, 1)])


class TestVerify:
    def test_regular_point_equality_case(self):
        rep = verify(star_point(6), constants=Constants(c_n=1.0, c4=1.0))
        assert rep.all_passed
        assert rep.record("radius_bound_side_form").slack == pytest.approx(0.0, abs=1e-9)
        assert rep.record("radius_bound_deficit_form").slack == pytest.approx(0.0, abs=1e-9)
        mt = rep.record("combined_variance_bound")
        assert mt.lhs == pytest.approx(0.0, abs=1e-12)
        assert mt.rhs == pytest.approx(0.0, abs=1e-12)

    def test_rectangle_radius_bound_slack(self):
        # oracle: nS - 4n tan(pi/n)|P| - 8 n^2 sin^2(pi/n) sigma_r^2
        #       = 4*10 - 16*2 - 0 = 8 in the rectangle's own scale
        rep = verify_vertices(RECT)
        assert rep.record("radius_bound_side_form").slack == pytest.approx(8.0, abs=1e-9)
        assert rep.record("nonnegativity").slack == pytest.approx(4.0, abs=1e-9)

    def test_equivalence_of_slacks(self):
        for seed in range(20):
            m = sample(7, seed=seed)
            rep = verify(m)
            assert abs(rep.record("radius_bound_side_form").slack - rep.record("radius_bound_deficit_form").slack) <= 1e-9

    def test_sampled_convex_points_pass(self):
        X, R = sample_convex_batch(5, 200, seed=3)
        for i in range(0, 200, 11):
            rep = verify(ManifoldPoint(x=X[i], r=R[i]))
            assert rep.all_passed, rep.as_dict()

    def test_not_on_manifold(self):
        m = star_point(4)
        bad = ManifoldPoint.__new__(ManifoldPoint)
        object.__setattr__(bad, "x", m.x * 1.001)
        object.__setattr__(bad, "r", m.r)
        with pytest.raises(errors.NotOnManifold):
            verify(bad)

    def test_ratio_invariant_under_index_rotation(self):
        from polygonlab.lab import _ratio_single

        m = sample(6, seed=12)
        z = m.as_vector()
        base = _ratio_single(z)
        for k in range(1, 6):
            rolled = np.concatenate([np.roll(m.x, k), np.roll(m.r, k)])
            assert _ratio_single(rolled) == pytest.approx(base, rel=1e-9)


class TestEstimateCn:
    def test_seed_reproducibility(self):
        a = estimate_cn(4, budget=20000, seed=1)
        b = estimate_cn(4, budget=20000, seed=99)
        assert abs(a.c_hat - b.c_hat) / a.c_hat <= 0.05

    def test_against_rayleigh(self):
        est = estimate_cn(5, budget=5000, seed=0)
        assert est.c_hat >= est.rayleigh_bound - 1e-6
        assert est.c_hat > 0 and math.isfinite(est.c_hat)

    def test_holdout(self):
        n = 5
        est = estimate_cn(n, budget=20000, seed=0)
        X, R = sample_convex_batch(n, 1000, seed=1234)
        from polygonlab.polygon import batch_metrics

        met = batch_metrics(X, R)
        lhs = met["radius_variance"] + met["area"] * met["angle_variance"]
        assert np.all(lhs <= est.c_hat * met["deficit"] + 1e-12)

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            estimate_cn(4, budget=10)

    def test_argmax_on_manifold(self):
        est = estimate_cn(4, budget=2000, seed=5)
        ManifoldPoint(x=est.argmax_x, r=est.argmax_r)  # validates residuals


class TestSharpness:
    def test_converges_to_rayleigh(self):
        n = 4
        basis = tangent_basis_at_star(n)
        rng = np.random.default_rng(0)
        for _ in range(5):
            w = rng.normal(size=basis.dim) @ basis.vectors
            res = sharpness_probe(n, w)
            assert res.limit > 0
            assert abs(res.ratios[-1] - res.rayleigh) / res.rayleigh <= 0.02

    def test_scaling_direction_rejected(self):
        n = 5
        w = np.concatenate([np.zeros(n), np.ones(n)])  # violates sum(r) = n
        with pytest.raises(errors.NotTangentDirection):
            sharpness_probe(n, w)

    def test_rayleigh_maximizer_attains_bound(self):
        n = 6
        bound, w = rayleigh_bound(n)
        res = sharpness_probe(n, w)
        assert res.rayleigh == pytest.approx(bound, rel=1e-9)
        assert abs(res.ratios[-1] - bound) / bound <= 0.02


class TestScaling:
    def test_identity_at_alpha_one(self):
        rep = scaling_check(RECT, 1.0)
        assert rep.all_passed
        assert rep.base == rep.scaled

    def test_rectangle_alpha_two(self):
        rep = scaling_check(RECT, 2.0)
        assert rep.all_passed
        assert rep.scaled["deficit"] == pytest.approx(16.0, rel=1e-12)
        assert rep.scaled["angle_variance"] == pytest.approx(rep.base["angle_variance"], rel=1e-12)

    def test_ratio_blows_up(self):
        base = summary_of_vertices(RECT)
        rep = scaling_check(RECT, 1e-3)
        ratio0 = base.angle_variance / base.deficit
        ratio = rep.scaled["angle_variance"] / rep.scaled["deficit"]
        assert ratio > 1e5 * ratio0

    def test_nonpositive_alpha(self):
        with pytest.raises(ValueError):
            scaling_check(RECT, 0.0)
