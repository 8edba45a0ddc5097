"""Finite-difference differentiation of the deficit and the stability
functional in ambient (x; r) coordinates, verification of their closed-form
derivatives at the regular point, and the numerical coercivity constant
sigma of the deficit Hessian on the tangent sphere.

The functions under differentiation are evaluated in extended precision
(numpy longdouble, 80-bit on x86) before the difference quotients are
formed: the deficit is a difference of near-equal quantities near the
regular point, and plain double precision would leave second-difference
quotients at small steps dominated by cancellation noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circulant import build_phi
from .errors import MismatchExceedsTolerance, NonpositiveSigma, StepTooSmall
from .manifold import TangentBasis, tangent_basis_at_star
from .polygon import _pi, deficit_of_vector, phi_of_vector

__all__ = [
    "DerivativeReport",
    "grad_fd",
    "hessian_fd",
    "deficit_gradient_at_star",
    "verify_gradients",
    "verify_hessian_phi",
    "deficit_hessian_at_star",
    "sigma_estimate",
    "star_vector_ld",
]

DEFAULT_STEP = 1e-5


def star_vector_ld(n: int) -> np.ndarray:
    """The regular point (2 pi / n, ...; 1, ...) in extended precision."""
    z = np.empty(2 * n, dtype=np.longdouble)
    z[:n] = 2 * _pi(np.longdouble) / n
    z[n:] = 1
    return z


def _check_step(h: float) -> None:
    if not 1e-7 <= h <= 1e-3:
        raise ValueError(f"finite-difference step {h} outside [1e-7, 1e-3]")


def grad_fd(f, z, h: float = DEFAULT_STEP, richardson_check: bool = True) -> np.ndarray:
    """Central-difference gradient of a scalar field on 2n coordinates.

    With richardson_check, the step-h estimate is compared against the
    step-2h estimate; a relative disagreement above 1e-3 signals that
    cancellation dominates and raises StepTooSmall.
    """
    _check_step(h)
    z = np.asarray(z, dtype=np.longdouble)
    g = _grad_central(f, z, np.longdouble(h))
    if richardson_check:
        g2 = _grad_central(f, z, np.longdouble(2 * h))
        scale = max(1.0, float(np.max(np.abs(g))))
        if float(np.max(np.abs(g - g2))) > 1e-3 * scale:
            raise StepTooSmall(f"gradient estimates at h={h} and 2h disagree beyond 1e-3")
    return g.astype(float)


def _grad_central(f, z, h):
    g = np.empty(len(z), dtype=np.longdouble)
    for i in range(len(z)):
        zp = z.copy()
        zm = z.copy()
        zp[i] += h
        zm[i] -= h
        g[i] = (f(zp) - f(zm)) / (2 * h)
    return g


def hessian_fd(f, z, h: float = DEFAULT_STEP) -> np.ndarray:
    """Symmetrized central-difference Hessian of a scalar field."""
    _check_step(h)
    z = np.asarray(z, dtype=np.longdouble)
    d = len(z)
    h = np.longdouble(h)
    f0 = f(z)
    H = np.empty((d, d), dtype=np.longdouble)
    shifted = np.empty((d, 2), dtype=np.longdouble)  # f(z +/- h e_i)
    for i in range(d):
        zp = z.copy()
        zm = z.copy()
        zp[i] += h
        zm[i] -= h
        shifted[i, 0] = f(zp)
        shifted[i, 1] = f(zm)
        H[i, i] = (shifted[i, 0] - 2 * f0 + shifted[i, 1]) / (h * h)
    for i in range(d):
        for j in range(i + 1, d):
            zpp = z.copy()
            zpm = z.copy()
            zmp = z.copy()
            zmm = z.copy()
            zpp[i] += h
            zpp[j] += h
            zpm[i] += h
            zpm[j] -= h
            zmp[i] -= h
            zmp[j] += h
            zmm[i] -= h
            zmm[j] -= h
            H[i, j] = H[j, i] = (f(zpp) - f(zpm) - f(zmp) + f(zmm)) / (4 * h * h)
    return H.astype(float)


# ---------------------------------------------------------------------------
# closed-form checks at the regular point
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivativeReport:
    function: str
    n: int
    step: float
    grad_max_abs_error: float
    hessian_max_rel_error: float

    def as_dict(self) -> dict:
        return {
            "function": self.function,
            "n": self.n,
            "step": self.step,
            "grad_max_abs_error": self.grad_max_abs_error,
            "hessian_max_rel_error": self.hessian_max_rel_error,
        }


def deficit_gradient_at_star(n: int) -> np.ndarray:
    """Closed form: 2 n tan(pi / n) on every angle component, 0 on radii."""
    g = np.zeros(2 * n)
    g[:n] = 2.0 * n * math.tan(math.pi / n)
    return g


def verify_gradients(n: int, h: float = DEFAULT_STEP) -> dict:
    """Finite-difference gradients of phi and the deficit at the regular
    point against their closed forms; returns the max absolute errors."""
    z = star_vector_ld(n)
    g_phi = grad_fd(phi_of_vector, z, h)
    g_del = grad_fd(deficit_of_vector, z, h)
    return {
        "phi_grad_max_abs": float(np.max(np.abs(g_phi))),
        "deficit_grad_max_abs_error": float(np.max(np.abs(g_del - deficit_gradient_at_star(n)))),
    }


def verify_hessian_phi(n: int, h: float = 1e-4, tol: float = 1e-5) -> DerivativeReport:
    """Finite-difference Hessian of phi at the regular point against the
    closed-form block circulant, entrywise, relative to the largest entry."""
    z = star_vector_ld(n)
    H = hessian_fd(phi_of_vector, z, h)
    Phi = build_phi(n).matrix
    scale = float(np.max(np.abs(Phi)))
    err = np.abs(H - Phi) / scale
    worst = float(err.max())
    if worst > tol:
        i, j = np.unravel_index(int(err.argmax()), err.shape)
        raise MismatchExceedsTolerance(
            f"phi Hessian mismatch {worst:.3e} at entry ({i}, {j}) exceeds {tol:.0e}"
        )
    g = grad_fd(phi_of_vector, z, h)
    return DerivativeReport(
        function="phi",
        n=n,
        step=h,
        grad_max_abs_error=float(np.max(np.abs(g))),
        hessian_max_rel_error=worst,
    )


# ---------------------------------------------------------------------------
# coercivity of the deficit Hessian on the tangent space
# ---------------------------------------------------------------------------

def deficit_hessian_at_star(n: int, h: float = 1e-4) -> np.ndarray:
    """Ambient finite-difference Hessian of the deficit at the regular point."""
    return hessian_fd(deficit_of_vector, star_vector_ld(n), h)


def sigma_estimate(n: int, h: float = 1e-4, basis: TangentBasis | None = None) -> float:
    """Minimum eigenvalue of the deficit Hessian restricted to the tangent
    space of M at the regular point. Strictly positive; NonpositiveSigma
    signals a numerical or modeling fault."""
    if basis is None:
        basis = tangent_basis_at_star(n)
    H = deficit_hessian_at_star(n, h)
    restricted = basis.vectors @ H @ basis.vectors.T
    sigma = float(np.linalg.eigvalsh(restricted)[0])
    if sigma <= 0.0:
        raise NonpositiveSigma(f"tangent-restricted deficit Hessian has min eigenvalue {sigma!r}")
    return sigma
