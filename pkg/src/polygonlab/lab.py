"""Inequality verification and sharp-constant estimation.

The objects of study, for a polygon with deficit delta, side/radius/angle
variances and area |P|:

* side form:     8 n^2 sin^2(pi/n) sigma_r^2  <=  n S - 4 n tan(pi/n) |P|
* deficit form:  8 n^2 sin^2(pi/n) sigma_r^2  <=  delta + n^2 sigma_s^2
  (algebraically the same inequality, via n^2 sigma_s^2 = n S - L^2)
* combined:      sigma_r^2 + |P| sigma_a^2  <=  c_n delta
* side variance: sigma_s^2 <= c_4 delta (convex case; constant empirical)
* total:         sigma_s^2 + sigma_r^2 + |P| sigma_a^2 <= (c_n + c_4) delta

The constant c_n is estimated as the supremum of the ratio
(sigma_r^2 + |P| sigma_a^2) / delta over the manifold. Near the regular
point the ratio is 0/0 and is replaced by its exact limit along tangent
curves, the Rayleigh quotient <Phi w, w> / (n^2 <D^2 delta(z*) w, w>).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .circulant import build_phi
from .derivatives import deficit_hessian_at_star
from .errors import (
    DegenerateDirection,
    NotOnManifold,
    NotTangentDirection,
    RetractionFailed,
)
from .manifold import (
    constraint_jacobian,
    residuals,
    retract,
    sample_batch,
    sample_near_star_batch,
    tangent_basis_at_star,
)
from .polygon import (
    MANIFOLD_TOL,
    ManifoldPoint,
    VertexPolygon,
    batch_convex,
    batch_metrics,
    central_coordinates,
    star_vector,
    summary_xr,
)

__all__ = [
    "Constants",
    "InequalityRecord",
    "InequalityReport",
    "ConstantEstimate",
    "SharpnessResult",
    "ScalingReport",
    "verify",
    "verify_vertices",
    "estimate_cn",
    "rayleigh_bound",
    "sharpness_probe",
    "scaling_check",
]

#: max-norm radius of the neighborhood of the regular point inside which the
#: raw ratio is 0/0-unstable and the Rayleigh limit is used instead
NEAR_RADIUS = 1e-2

#: deficits below this are double-precision noise and never divided by
DEFICIT_FLOOR = 1e-14


# ---------------------------------------------------------------------------
# inequality reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constants:
    """Empirically estimated constants for the constant-bearing inequalities."""
    c_n: float | None = None
    c4: float | None = None


@dataclass(frozen=True)
class InequalityRecord:
    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool

    def as_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "slack": self.slack, "pass": self.passed}


@dataclass(frozen=True)
class InequalityReport:
    n: int
    convex: bool
    records: tuple

    @property
    def all_passed(self) -> bool:
        return all(rec.passed for rec in self.records)

    def record(self, name: str) -> InequalityRecord:
        for rec in self.records:
            if rec.name == name:
                return rec
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "convex": self.convex,
            "all_pass": self.all_passed,
            "records": [rec.as_dict() for rec in self.records],
        }


def _record(name: str, lhs: float, rhs: float, identity: bool = False) -> InequalityRecord:
    slack = rhs - lhs
    tol = 1e-9 * max(1.0, abs(lhs), abs(rhs))
    passed = abs(slack) <= tol if identity else slack >= -tol
    return InequalityRecord(name=name, lhs=lhs, rhs=rhs, slack=slack, passed=passed)


def verify(m: ManifoldPoint, constants: Constants | None = None,
           scale: float = 1.0, membership_tol: float = 10 * MANIFOLD_TOL) -> InequalityReport:
    """Evaluate every inequality and identity on one manifold point.

    `scale` is the radius rescaling factor reported by to_manifold_point;
    all lhs/rhs/slack values are divided by scale**2, which maps them back
    to the scale of the original polygon (every term is quadratic in length).
    """
    res = residuals(m.x, m.r)
    if not res.on_manifold(membership_tol):
        raise NotOnManifold(f"constraint residual {res.max_abs():.3e}")
    n = m.n
    s = summary_xr(m.x, m.r)
    convex = bool(batch_convex(m.x[None, :], m.r[None, :])[0])
    u = 1.0 / (scale * scale)
    sin2 = math.sin(math.pi / n) ** 2
    delta = s.deficit * u
    lhs_sh = 8.0 * n * n * sin2 * s.radius_variance * u
    records = [
        _record("variance_identity", n * n * s.side_variance * u,
                (n * s.side_square_sum - s.perimeter ** 2) * u, identity=True),
        _record("radius_bound_side_form", lhs_sh,
                (n * s.side_square_sum - 4.0 * n * math.tan(math.pi / n) * s.area) * u),
        _record("radius_bound_deficit_form", lhs_sh, delta + n * n * s.side_variance * u),
    ]
    # the two slacks above differ exactly by the variance identity
    records.append(_record("radius_bound_equivalence", records[1].slack, records[2].slack,
                           identity=True))
    if convex:
        records.append(_record("nonnegativity", 0.0, delta))
    if constants is not None and constants.c_n is not None:
        records.append(_record("combined_variance_bound",
                               (s.radius_variance + s.area * s.angle_variance) * u,
                               constants.c_n * delta))
    if constants is not None and constants.c4 is not None and convex:
        records.append(_record("side_variance", s.side_variance * u, constants.c4 * delta))
    if (constants is not None and constants.c_n is not None
            and constants.c4 is not None and convex):
        records.append(_record(
            "total_variance_bound",
            (s.side_variance + s.radius_variance + s.area * s.angle_variance) * u,
            (constants.c_n + constants.c4) * delta))
    return InequalityReport(n=n, convex=convex, records=tuple(records))


def verify_vertices(P: VertexPolygon, constants: Constants | None = None) -> InequalityReport:
    """Verify a vertex polygon; slacks are reported in the polygon's own
    scale (the manifold rescaling is undone)."""
    from .polygon import to_manifold_point

    m, scale = to_manifold_point(P)
    return verify(m, constants=constants, scale=scale)


# ---------------------------------------------------------------------------
# constant estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantEstimate:
    n: int
    c_hat: float
    rayleigh_bound: float
    winning_phase: str           # "local" or "global"
    argmax_x: np.ndarray
    argmax_r: np.ndarray
    samples_evaluated: int
    refinement_iterations: int
    seed: int
    budget_exhausted: bool = False

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "c_hat": self.c_hat,
            "rayleigh_bound": self.rayleigh_bound,
            "winning_phase": self.winning_phase,
            "argmax": {"n": self.n, "x": list(map(float, self.argmax_x)),
                       "r": list(map(float, self.argmax_r))},
            "samples_evaluated": self.samples_evaluated,
            "refinement_iterations": self.refinement_iterations,
            "seed": self.seed,
            "budget_exhausted": self.budget_exhausted,
        }


def _ratio_batch(X: np.ndarray, R: np.ndarray) -> np.ndarray:
    met = batch_metrics(X, R)
    delta = met["deficit"]
    num = met["radius_variance"] + met["area"] * met["angle_variance"]
    out = np.full(len(delta), -np.inf)
    ok = delta > DEFICIT_FLOOR
    out[ok] = num[ok] / delta[ok]
    return out


def _ratio_single(z: np.ndarray) -> float:
    n = len(z) // 2
    return float(_ratio_batch(z[None, :n], z[None, n:])[0])


def rayleigh_bound(n: int, h: float = 1e-4):
    """Maximum of <Phi w, w> / (n^2 <D^2 delta(z*) w, w>) over unit tangent
    directions w: the exact limit of the ratio along curves into the
    regular point. Returns (bound, maximizing tangent direction)."""
    basis = tangent_basis_at_star(n)
    V = basis.vectors
    A = V @ build_phi(n).matrix @ V.T
    B = V @ deficit_hessian_at_star(n, h) @ V.T
    vals, vecs = scipy.linalg.eigh(A, n * n * B)
    w = vecs[:, -1] @ V
    return float(vals[-1]), w / np.linalg.norm(w)


def _project_tangent(z: np.ndarray, g: np.ndarray) -> np.ndarray:
    n = len(z) // 2
    J = constraint_jacobian(z[:n], z[n:])
    lam = np.linalg.lstsq(J.T, g, rcond=None)[0]
    return g - J.T @ lam


def _ascend(z: np.ndarray, evals_left: int, fd_step: float = 1e-6):
    """Projected-gradient ascent on the ratio with retraction; returns the
    best point, its ratio, the iteration count and evaluations used."""
    best = _ratio_single(z)
    step = 1e-2
    iters = 0
    used = 0
    d = len(z)
    while used + 2 * d + 2 < evals_left and step > 1e-10:
        g = np.empty(d)
        for i in range(d):
            zp = z.copy()
            zm = z.copy()
            zp[i] += fd_step
            zm[i] -= fd_step
            g[i] = (_ratio_single(zp) - _ratio_single(zm)) / (2 * fd_step)
        used += 2 * d
        g = _project_tangent(z, g)
        gn = np.linalg.norm(g)
        if not np.isfinite(gn) or gn < 1e-12:
            break
        try:
            cand = retract(z + step * g / gn).as_vector()
        except RetractionFailed:
            step *= 0.5
            continue
        val = _ratio_single(cand)
        used += 1
        iters += 1
        if val > best and np.max(np.abs(cand - star_vector(len(z) // 2))) > NEAR_RADIUS:
            z, best = cand, val
            step *= 1.3
        else:
            step *= 0.5
    return z, best, iters, used


def estimate_cn(n: int, budget: int = 20000, seed: int = 0) -> ConstantEstimate:
    """Two-phase estimate of the sharp constant.

    Global phase: the ratio is maximized over convex sampled points of M
    outside a small neighborhood of the regular point (where the deficit is
    bounded away from zero), then refined by multi-start projected-gradient
    ascent with retraction. Local phase: the Rayleigh-quotient limit at the
    regular point. The estimate is the larger of the two.
    """
    if budget < 1000:
        raise ValueError("budget must be at least 1000")
    rng = np.random.default_rng(seed)
    z0 = star_vector(n)
    basis = tangent_basis_at_star(n)

    sample_budget = int(budget * 0.7)
    m_global = sample_budget // 2
    Xg, Rg = sample_batch(n, m_global, seed=rng)
    t = 10.0 ** rng.uniform(math.log10(2 * NEAR_RADIUS), 0.0, size=sample_budget - m_global)
    Xn, Rn = sample_near_star_batch(n, len(t), t, seed=rng, basis=basis)
    X = np.concatenate([Xg, Xn])
    R = np.concatenate([Rg, Rn])
    Z = np.concatenate([X, R], axis=1)
    far = np.max(np.abs(Z - z0), axis=1) > NEAR_RADIUS
    convex = batch_convex(X, R)
    keep = far & convex
    ratios = _ratio_batch(X[keep], R[keep])
    Zk = Z[keep]
    evaluated = int(keep.sum())
    exhausted = evaluated < min(100, budget // 10)

    best_global = -math.inf
    best_z = None
    iters = 0
    if evaluated:
        order = np.argsort(ratios)[::-1]
        starts = order[: min(16, len(order))]
        left = budget - sample_budget
        per_start = max(left // max(len(starts), 1), 1)
        for idx in starts:
            if not np.isfinite(ratios[idx]):
                continue
            z, val, it, used = _ascend(Zk[idx].copy(), per_start)
            iters += it
            if val > best_global:
                best_global, best_z = val, z

    rayleigh, w_max = rayleigh_bound(n)
    if best_global >= rayleigh:
        c_hat, phase = best_global, "global"
        zbest = best_z
    else:
        c_hat, phase = rayleigh, "local"
        # representative argmax: a short step along the maximizing direction
        zbest = retract(z0 + 1e-3 * w_max).as_vector()
    return ConstantEstimate(
        n=n,
        c_hat=c_hat,
        rayleigh_bound=rayleigh,
        winning_phase=phase,
        argmax_x=zbest[:n],
        argmax_r=zbest[n:],
        samples_evaluated=evaluated,
        refinement_iterations=iters,
        seed=seed,
        budget_exhausted=exhausted,
    )


# ---------------------------------------------------------------------------
# sharpness of the exponent
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SharpnessResult:
    n: int
    t_values: np.ndarray
    ratios: np.ndarray
    limit: float
    rayleigh: float

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "t_values": list(map(float, self.t_values)),
            "ratios": list(map(float, self.ratios)),
            "limit": self.limit,
            "rayleigh": self.rayleigh,
        }


def sharpness_probe(n: int, w, t_sequence=(1e-1, 1e-2, 1e-3),
                    hessian: np.ndarray | None = None) -> SharpnessResult:
    """Ratio along the retracted curve z* + t w for decreasing t.

    The limit is strictly positive and equals the Rayleigh quotient of w,
    so no superlinear modulus of continuity can replace the linear bound.
    Rejects directions outside the tangent space (e.g. the pure radius
    scaling direction, which violates the radius-sum constraint) and
    directions annihilated by the Phi quadratic form.
    """
    z0 = star_vector(n)
    w = np.asarray(w, dtype=float)
    if w.shape != (2 * n,):
        raise NotTangentDirection(f"expected a direction of length {2 * n}, got shape {w.shape}")
    J = constraint_jacobian(z0[:n], z0[n:])
    w = w / np.linalg.norm(w)
    if np.max(np.abs(J @ w)) > 1e-8:
        raise NotTangentDirection("direction violates the manifold constraints at the regular point")
    phi_w = float(w @ build_phi(n).matrix @ w)
    if phi_w <= 1e-12:
        raise DegenerateDirection("direction is annihilated by the Hessian quadratic form")
    if hessian is None:
        hessian = deficit_hessian_at_star(n)
    rayleigh = phi_w / (n * n * float(w @ hessian @ w))
    ts = np.sort(np.asarray(t_sequence, dtype=float))[::-1]
    ratios = np.array([_ratio_single(retract(z0 + t * w).as_vector()) for t in ts])
    # linear-in-t extrapolation from the two smallest magnitudes
    if len(ts) >= 2:
        t1, t2 = ts[-2], ts[-1]
        limit = float(ratios[-1] + (ratios[-1] - ratios[-2]) * t2 / (t1 - t2))
    else:
        limit = float(ratios[-1])
    if not (np.isfinite(limit) and limit > 0.0):
        raise DegenerateDirection(f"ratio limit along this direction is not positive: {limit!r}")
    return SharpnessResult(n=n, t_values=ts, ratios=ratios, limit=limit, rayleigh=rayleigh)


# ---------------------------------------------------------------------------
# scaling counterexample
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingReport:
    alpha: float
    base: dict
    scaled: dict
    checks: dict

    @property
    def all_passed(self) -> bool:
        return all(c["pass"] for c in self.checks.values())

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "base": self.base, "scaled": self.scaled,
                "checks": self.checks, "all_pass": self.all_passed}


def scaling_check(P, alpha: float, tol: float = 1e-12) -> ScalingReport:
    """Dilate the radii of P (a VertexPolygon or ManifoldPoint) about its
    barycenter by alpha and verify the exact scaling laws: deficit, radius
    variance and area scale by alpha^2 while the central-angle variance is
    unchanged. A non-regular polygon therefore has sigma_a^2 / delta ->
    infinity as alpha -> 0: no bound sigma_a^2 <= c delta can hold."""
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    if isinstance(P, ManifoldPoint):
        x, r = P.x, P.r
    else:
        x, r = central_coordinates(P)
    base = summary_xr(x, r)
    scaled = summary_xr(x, alpha * r)
    a2 = alpha * alpha

    def check(name, got, expected):
        denom = max(abs(expected), 1e-300)
        rel = abs(got - expected) / denom if expected != 0.0 else abs(got)
        return name, {"expected": expected, "actual": got, "rel_err": rel,
                      "pass": rel <= tol}

    checks = dict([
        check("deficit", scaled.deficit, a2 * base.deficit),
        check("radius_variance", scaled.radius_variance, a2 * base.radius_variance),
        check("angle_variance", scaled.angle_variance, base.angle_variance),
        check("area", scaled.area, a2 * base.area),
    ])
    return ScalingReport(alpha=alpha, base=base.as_dict(), scaled=scaled.as_dict(),
                         checks=checks)
