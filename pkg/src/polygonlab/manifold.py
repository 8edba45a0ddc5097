"""Sampling, validation, projection and tangent-space machinery for the
polygonal manifold

    M = { (x; r) : x_i, r_i >= 0,  sum x_i = 2 pi,  sum r_i = n,
          sum r_i cos(theta_i) = 0,  sum r_i sin(theta_i) = 0 },

where theta_i = x_1 + ... + x_{i-1}. For fixed angles x the remaining
three constraints are *linear* in r, which the sampler and the retraction
exploit: the radius part is always solved exactly (to roundoff) by small
linear algebra, and positivity is handled by rejection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import RetractionFailed, SamplingExhausted
from .polygon import MANIFOLD_TOL, ManifoldPoint, star_vector

__all__ = [
    "ConstraintResiduals",
    "TangentBasis",
    "residuals",
    "constraint_jacobian",
    "tangent_basis_at_star",
    "retract",
    "sample",
    "sample_near_star",
    "sample_batch",
    "sample_convex_batch",
]


@dataclass(frozen=True)
class ConstraintResiduals:
    angle_sum: float
    radius_sum: float
    barycenter_cos: float
    barycenter_sin: float

    def max_abs(self) -> float:
        return max(abs(self.angle_sum), abs(self.radius_sum),
                   abs(self.barycenter_cos), abs(self.barycenter_sin))

    def on_manifold(self, tol: float = MANIFOLD_TOL) -> bool:
        return self.max_abs() < tol

    def as_dict(self) -> dict:
        return {
            "angle_sum": self.angle_sum,
            "radius_sum": self.radius_sum,
            "barycenter_cos": self.barycenter_cos,
            "barycenter_sin": self.barycenter_sin,
        }


def _theta(x: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(x[:-1])])


def residuals(x, r) -> ConstraintResiduals:
    """The four constraint residuals of a candidate (x; r), verbatim."""
    x = np.asarray(x, dtype=float)
    r = np.asarray(r, dtype=float)
    n = len(x)
    th = _theta(x)
    return ConstraintResiduals(
        angle_sum=float(x.sum() - 2.0 * math.pi),
        radius_sum=float(r.sum() - n),
        barycenter_cos=float(np.dot(r, np.cos(th))),
        barycenter_sin=float(np.dot(r, np.sin(th))),
    )


# ---------------------------------------------------------------------------
# linearization
# ---------------------------------------------------------------------------

def _radius_system(x: np.ndarray):
    """Matrix A (3 x n) and rhs b of the constraints that are linear in r
    for fixed x: sum r = n, sum r cos(theta) = 0, sum r sin(theta) = 0."""
    n = len(x)
    th = _theta(x)
    A = np.vstack([np.ones(n), np.cos(th), np.sin(th)])
    b = np.array([float(n), 0.0, 0.0])
    return A, b


def constraint_jacobian(x, r) -> np.ndarray:
    """Jacobian (4 x 2n) of the four constraint functions at (x; r).

    Row order: angle sum, radius sum, barycenter cos, barycenter sin.
    theta_i depends on x_j exactly for j < i, so the x-derivatives of the
    barycenter rows are suffix sums over i > j.
    """
    x = np.asarray(x, dtype=float)
    r = np.asarray(r, dtype=float)
    n = len(x)
    th = _theta(x)
    c, s = np.cos(th), np.sin(th)
    J = np.zeros((4, 2 * n))
    J[0, :n] = 1.0
    J[1, n:] = 1.0
    # suffix sums: d theta_i / d x_j = 1 for i > j (0-based j)
    rs = r * s
    rc = r * c
    suffix_rs = np.concatenate([np.cumsum(rs[::-1])[::-1][1:], [0.0]])
    suffix_rc = np.concatenate([np.cumsum(rc[::-1])[::-1][1:], [0.0]])
    J[2, :n] = -suffix_rs
    J[2, n:] = c
    J[3, :n] = suffix_rc
    J[3, n:] = s
    return J


@dataclass(frozen=True)
class TangentBasis:
    """Orthonormal basis (rows) of the tangent space of M at the regular
    point: the kernel of the constraint Jacobian, dimension 2n - 4."""

    n: int
    vectors: np.ndarray  # (2n - 4, 2n)

    @property
    def dim(self) -> int:
        return len(self.vectors)


def tangent_basis_at_star(n: int) -> TangentBasis:
    z = star_vector(n)
    J = constraint_jacobian(z[:n], z[n:])
    kernel = scipy.linalg.null_space(J)  # (2n, k), orthonormal columns
    if kernel.shape[1] != 2 * n - 4:
        raise AssertionError(
            f"tangent space at the regular {n}-gon has dimension {kernel.shape[1]}, expected {2 * n - 4}"
        )
    return TangentBasis(n=n, vectors=np.ascontiguousarray(kernel.T))


# ---------------------------------------------------------------------------
# retraction
# ---------------------------------------------------------------------------

def retract(z) -> ManifoldPoint:
    """Map a near-manifold point back onto M.

    The angle block is rescaled to sum 2*pi; the radius block is then
    projected (least squares, minimal Euclidean move) onto the affine
    solution set of the linear radius constraints for the new angles.
    Raises RetractionFailed if any coordinate becomes nonpositive.
    """
    z = np.asarray(z, dtype=float)
    n = len(z) // 2
    x = z[:n] * (2.0 * math.pi / z[:n].sum())
    A, b = _radius_system(x)
    r = z[n:]
    G = A @ A.T
    r = r - A.T @ np.linalg.solve(G, A @ r - b)
    if np.any(x <= 0.0) or np.any(r <= 0.0):
        raise RetractionFailed("retraction produced a nonpositive coordinate")
    return ManifoldPoint(x=x, r=r)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

#: smallest admissible angle/radius in a sampler draw
_POSITIVITY_FLOOR = 1e-6


def _solve_radii(x: np.ndarray, rng: np.random.Generator, spread: float) -> np.ndarray | None:
    """Particular solution of the radius constraints plus a random kernel
    combination; None if positivity fails for this draw."""
    n = len(x)
    A, b = _radius_system(x)
    G = A @ A.T
    r = A.T @ np.linalg.solve(G, b)  # least-norm particular solution
    if n > 3 and spread > 0.0:
        g = rng.normal(scale=spread, size=n)
        r = r + g - A.T @ np.linalg.solve(G, A @ g)
    if np.any(r <= _POSITIVITY_FLOOR):
        return None
    return r


def sample(n: int, seed=None, attempts: int = 200, spread: float = 0.3) -> ManifoldPoint:
    """Draw one point of M: angles from a symmetric Dirichlet scaled to
    2*pi, radii from the exact linear solve plus a random kernel term,
    with rejection on positivity. Convexity of the image is not guaranteed.
    """
    rng = _rng(seed)
    for _ in range(attempts):
        x = 2.0 * math.pi * rng.dirichlet(np.ones(n))
        if np.any(x <= _POSITIVITY_FLOOR):
            continue
        r = _solve_radii(x, rng, spread)
        if r is None:
            continue
        return ManifoldPoint(x=x, r=r)
    raise SamplingExhausted(f"no admissible point of M after {attempts} attempts (n={n})")


def sample_near_star(n: int, magnitude: float, seed=None, basis: TangentBasis | None = None,
                     attempts: int = 200) -> ManifoldPoint:
    """Draw the regular point plus a random tangent vector of the given
    magnitude, retracted back onto M. Used for the local regime."""
    rng = _rng(seed)
    if basis is None:
        basis = tangent_basis_at_star(n)
    z0 = star_vector(n)
    for _ in range(attempts):
        coef = rng.normal(size=basis.dim)
        w = coef @ basis.vectors
        w /= np.linalg.norm(w)
        try:
            return retract(z0 + magnitude * w)
        except RetractionFailed:
            continue
    raise SamplingExhausted(f"no retractable tangent draw at magnitude {magnitude} (n={n})")


# ---------------------------------------------------------------------------
# vectorized batch sampling
# ---------------------------------------------------------------------------

def _batch_project_radii(X: np.ndarray, R0: np.ndarray) -> np.ndarray:
    """Project each radius row onto the affine constraint set of its angle
    row (batched 3x3 solves)."""
    m, n = X.shape
    theta = np.concatenate([np.zeros((m, 1)), np.cumsum(X[:, :-1], axis=1)], axis=1)
    A = np.stack([np.ones_like(theta), np.cos(theta), np.sin(theta)], axis=1)  # (m, 3, n)
    b = np.zeros((m, 3))
    b[:, 0] = n
    G = A @ np.transpose(A, (0, 2, 1))  # (m, 3, 3)
    resid = np.einsum("mkn,mn->mk", A, R0) - b
    lam = np.linalg.solve(G, resid[:, :, None])[:, :, 0]
    return R0 - np.einsum("mkn,mk->mn", A, lam)


def sample_batch(n: int, count: int, seed=None, spread: float = 0.3):
    """Vectorized global draw: returns (X, R) arrays of shape (count, n).
    Rows satisfy all manifold constraints; positivity enforced by rejection."""
    rng = _rng(seed)
    out_x, out_r, have = [], [], 0
    for _ in range(200):
        m = max(2 * (count - have), 64)
        X = 2.0 * math.pi * rng.dirichlet(np.ones(n), size=m)
        R0 = np.ones((m, n)) + rng.normal(scale=spread, size=(m, n))
        R = _batch_project_radii(X, R0)
        ok = np.all(X > _POSITIVITY_FLOOR, axis=1) & np.all(R > _POSITIVITY_FLOOR, axis=1)
        out_x.append(X[ok])
        out_r.append(R[ok])
        have += int(ok.sum())
        if have >= count:
            break
    else:
        raise SamplingExhausted(f"batch sampler stalled (n={n}, wanted {count}, got {have})")
    X = np.concatenate(out_x)[:count]
    R = np.concatenate(out_r)[:count]
    return X, R


def sample_near_star_batch(n: int, count: int, magnitudes, seed=None,
                           basis: TangentBasis | None = None):
    """Vectorized near-regular draw: z* + t w with random unit tangent w and
    per-row magnitude t, retracted. Returns (X, R) of shape (count, n)."""
    rng = _rng(seed)
    if basis is None:
        basis = tangent_basis_at_star(n)
    z0 = star_vector(n)
    t = np.broadcast_to(np.asarray(magnitudes, dtype=float), (count,))
    coef = rng.normal(size=(count, basis.dim))
    W = coef @ basis.vectors
    W /= np.linalg.norm(W, axis=1, keepdims=True)
    Z = z0 + t[:, None] * W
    X = Z[:, :n] * (2.0 * math.pi / Z[:, :n].sum(axis=1, keepdims=True))
    R = _batch_project_radii(X, Z[:, n:])
    ok = np.all(X > _POSITIVITY_FLOOR, axis=1) & np.all(R > _POSITIVITY_FLOOR, axis=1)
    return X[ok], R[ok]


def sample_convex_batch(n: int, count: int, seed=None, max_rounds: int = 400):
    """Draw `count` manifold points whose image is convex.

    Convex polygons are a thin slice of M once n grows, so the draw mixes
    global samples with near-regular tangent perturbations at log-uniform
    magnitudes and keeps the convex ones. Returns (X, R) of shape (count, n).
    """
    from .polygon import batch_convex

    rng = _rng(seed)
    basis = tangent_basis_at_star(n)
    out_x, out_r, have = [], [], 0
    for _ in range(max_rounds):
        m = min(max(2 * (count - have), 256), 20000)
        t = 10.0 ** rng.uniform(-3.0, 0.0, size=m)
        X, R = sample_near_star_batch(n, m, t, seed=rng, basis=basis)
        Xg, Rg = sample_batch(n, max(m // 4, 64), seed=rng)
        X = np.concatenate([X, Xg])
        R = np.concatenate([R, Rg])
        ok = batch_convex(X, R)
        out_x.append(X[ok])
        out_r.append(R[ok])
        have += int(ok.sum())
        if have >= count:
            break
    else:
        raise SamplingExhausted(f"convex batch sampler stalled (n={n}, got {have}/{count})")
    X = np.concatenate(out_x)[:count]
    R = np.concatenate(out_r)[:count]
    return X, R
