"""Constraint residuals, sampling, retraction and the tangent basis."""

import math

import numpy as np
import pytest

from polygonlab import errors
from polygonlab.manifold import (
    constraint_jacobian,
    residuals,
    retract,
    sample,
    sample_batch,
    sample_convex_batch,
    sample_near_star,
    tangent_basis_at_star,
)
from polygonlab.polygon import star_point, star_vector


class TestResiduals:
    def test_regular_point_all_zero(self):
        z = star_point(8)
        res = residuals(z.x, z.r)
        assert res.max_abs() < 1e-12

    def test_radius_perturbation_hits_barycenter_rows_only(self):
        z = star_point(6)
        r = z.r.copy()
        r[0] += 0.1
        r[1] -= 0.1
        res = residuals(z.x, r)
        assert res.radius_sum == pytest.approx(0.0, abs=1e-12)
        # oracle: the barycenter sums move by 0.1 (cos t0 - cos t1, ...)
        t = np.concatenate([[0.0], np.cumsum(z.x[:-1])])
        assert res.barycenter_cos == pytest.approx(0.1 * (math.cos(t[0]) - math.cos(t[1])), abs=1e-12)
        assert res.barycenter_sin == pytest.approx(0.1 * (math.sin(t[0]) - math.sin(t[1])), abs=1e-12)
        assert abs(res.barycenter_cos) > 1e-3

    def test_scaled_angles(self):
        z = star_point(5)
        res = residuals(1.01 * z.x, z.r)
        assert res.angle_sum == pytest.approx(0.02 * math.pi, abs=1e-12)


class TestSample:
    def test_n3_unique_radii(self):
        m = sample(3, seed=11)
        # for n=3 the three linear constraints determine r exactly: re-solve
        t = np.concatenate([[0.0], np.cumsum(m.x[:-1])])
        A = np.vstack([np.ones(3), np.cos(t), np.sin(t)])
        r_expected = np.linalg.solve(A, np.array([3.0, 0.0, 0.0]))
        assert np.allclose(m.r, r_expected, atol=1e-9)

    @pytest.mark.parametrize("n", [3, 6, 12])
    def test_on_manifold(self, n):
        m = sample(n, seed=42)
        assert residuals(m.x, m.r).max_abs() < 1e-9
        assert np.all(m.x > 0) and np.all(m.r > 0)

    def test_batch_on_manifold(self):
        X, R = sample_batch(7, 300, seed=0)
        assert X.shape == (300, 7)
        for i in range(0, 300, 37):
            assert residuals(X[i], R[i]).max_abs() < 1e-9

    def test_convex_batch(self):
        from polygonlab.polygon import batch_convex

        X, R = sample_convex_batch(9, 500, seed=1)
        assert batch_convex(X, R).all()

    def test_infeasible_angles_rejected(self):
        # x = (pi, pi/2, pi/2) forces a nonpositive radius in the 3x3 solve,
        # so sampling at n=3 must survive by retrying with fresh angles
        t = np.concatenate([[0.0], np.cumsum([math.pi, math.pi / 2])])
        A = np.vstack([np.ones(3), np.cos(t), np.sin(t)])
        r = np.linalg.solve(A, np.array([3.0, 0.0, 0.0]))
        assert np.min(r) <= 1e-6  # at or below the sampler's positivity floor
        m = sample(3, seed=0)
        assert np.all(m.r > 0)


class TestRetract:
    def test_idempotent_on_manifold(self):
        m = sample(6, seed=5)
        z = m.as_vector()
        back = retract(z).as_vector()
        assert np.max(np.abs(back - z)) < 1e-12

    def test_angle_rescaling(self):
        z = star_vector(5)
        z2 = z.copy()
        z2[:5] *= 1.05
        out = retract(z2)
        assert np.allclose(out.x, z[:5], atol=1e-12)

    def test_contracts_tangent_perturbations(self):
        n = 7
        basis = tangent_basis_at_star(n)
        z0 = star_vector(n)
        rng = np.random.default_rng(3)
        for eps in (1e-3, 1e-4):
            w = rng.normal(size=basis.dim) @ basis.vectors
            w /= np.linalg.norm(w)
            out = retract(z0 + eps * w).as_vector()
            assert np.linalg.norm(out - z0) <= 2 * eps
            assert np.linalg.norm(out - (z0 + eps * w)) <= 1e-5

    def test_failure_on_large_negative(self):
        z = star_vector(4)
        z[4] = -1.5  # radius block entry forced negative beyond repair
        z[5] = 3.5
        with pytest.raises(errors.RetractionFailed):
            retract(z)


class TestTangentBasis:
    @pytest.mark.parametrize("n", range(3, 33))
    def test_dimension(self, n):
        assert tangent_basis_at_star(n).dim == 2 * n - 4

    @pytest.mark.parametrize("n", [3, 8, 16])
    def test_orthonormal_and_in_kernel(self, n):
        basis = tangent_basis_at_star(n)
        V = basis.vectors
        gram = V @ V.T
        assert np.max(np.abs(gram - np.eye(basis.dim))) < 1e-12
        z = star_point(n)
        J = constraint_jacobian(z.x, z.r)
        assert np.max(np.abs(J @ V.T)) < 1e-10

    def test_jacobian_against_finite_differences(self):
        # independent oracle: numerically differentiate the residual map
        m = sample(5, seed=8)
        J = constraint_jacobian(m.x, m.r)
        z = m.as_vector()
        h = 1e-7
        for i in range(10):
            zp, zm = z.copy(), z.copy()
            zp[i] += h
            zm[i] -= h
            rp = residuals(zp[:5], zp[5:])
            rm = residuals(zm[:5], zm[5:])
            col = np.array([
                rp.angle_sum - rm.angle_sum,
                rp.radius_sum - rm.radius_sum,
                rp.barycenter_cos - rm.barycenter_cos,
                rp.barycenter_sin - rm.barycenter_sin,
            ]) / (2 * h)
            assert np.allclose(col, J[:, i], atol=1e-6)


def test_near_star_sampling_stays_close():
    m = sample_near_star(6, 1e-3, seed=2)
    z0 = star_vector(6)
    assert np.max(np.abs(m.as_vector() - z0)) < 5e-3
    assert residuals(m.x, m.r).max_abs() < 1e-9


def test_sampling_exhausted():
    with pytest.raises(errors.SamplingExhausted):
        sample(3, seed=0, attempts=0)
