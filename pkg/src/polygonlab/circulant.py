"""The symmetric circulant matrix C with generator (n-1, -1, ..., -1),
its closed-form spectrum (0 once, n with multiplicity n-1), the real
orthogonal cosine/sine eigenbasis, the block Hessian

    Phi = diag( n sin(2 pi / n) C,  2 C ),

and the coercivity bound of the Phi quadratic form on the zero-mean
subspace Z (angle block and radius block each summing to zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch

__all__ = [
    "CirculantSystem",
    "BlockHessian",
    "build_circulant",
    "build_phi",
    "quadratic_form",
    "spectral_quadratic_form",
    "min_eig_on_Z",
    "zero_mean_basis",
]


@dataclass(frozen=True)
class CirculantSystem:
    n: int
    generator: np.ndarray    # (n,) first row
    matrix: np.ndarray       # (n, n)
    eigenvalues: np.ndarray  # (n,) ordered to match `basis`
    basis: np.ndarray        # (n, n), rows v_0 .. v_{n-1}, orthogonal, not normalized


@dataclass(frozen=True)
class BlockHessian:
    n: int
    matrix: np.ndarray  # (2n, 2n)

    @property
    def x_weight(self) -> float:
        return self.n * math.sin(2.0 * math.pi / self.n)

    @property
    def r_weight(self) -> float:
        return 2.0


def _cos_sin_basis(n: int) -> np.ndarray:
    """Rows v_0..v_{n-1}: the all-ones vector, then alternating cosine and
    sine rows at frequencies l = 1..floor(n/2). For even n the sine row at
    l = n/2 is identically zero and is dropped, which leaves exactly n rows."""
    k = np.arange(n)
    rows = [np.ones(n)]
    for l in range(1, n // 2 + 1):
        rows.append(np.cos(2.0 * math.pi * l * k / n))
        sine = np.sin(2.0 * math.pi * l * k / n)
        if np.max(np.abs(sine)) > 1e-12:
            rows.append(sine)
    return np.vstack(rows[:n])


def build_circulant(n: int) -> CirculantSystem:
    if n < 3:
        raise DimensionMismatch(f"need n >= 3, got {n}")
    gen = np.full(n, -1.0)
    gen[0] = n - 1.0
    C = scipy.linalg.circulant(gen).T  # symmetric, so the transpose is cosmetic
    eig = np.full(n, float(n))
    eig[0] = 0.0
    return CirculantSystem(n=n, generator=gen, matrix=C, eigenvalues=eig,
                           basis=_cos_sin_basis(n))


def build_phi(n: int) -> BlockHessian:
    C = build_circulant(n).matrix
    M = np.zeros((2 * n, 2 * n))
    M[:n, :n] = n * math.sin(2.0 * math.pi / n) * C
    M[n:, n:] = 2.0 * C
    return BlockHessian(n=n, matrix=M)


def quadratic_form(phi: BlockHessian, z) -> float:
    """<Phi z, z> by a dense matrix-vector product."""
    z = np.asarray(z, dtype=float)
    if z.shape != (2 * phi.n,):
        raise DimensionMismatch(f"expected a vector of length {2 * phi.n}, got shape {z.shape}")
    return float(z @ phi.matrix @ z)


def spectral_quadratic_form(phi: BlockHessian, z) -> float:
    """<Phi z, z> via the eigenbasis expansion: expand each block in the
    cosine/sine basis and weight the non-constant coefficients by the
    eigenvalue n times the block weight."""
    z = np.asarray(z, dtype=float)
    n = phi.n
    if z.shape != (2 * n,):
        raise DimensionMismatch(f"expected a vector of length {2 * n}, got shape {z.shape}")
    V = build_circulant(n).basis
    norms2 = (V * V).sum(axis=1)
    ax = (V @ z[:n]) / norms2
    ar = (V @ z[n:]) / norms2
    return float(
        n * n * math.sin(2.0 * math.pi / n) * np.sum(ax[1:] ** 2 * norms2[1:])
        + 2.0 * n * np.sum(ar[1:] ** 2 * norms2[1:])
    )


def zero_mean_basis(n: int) -> np.ndarray:
    """Orthonormal basis (columns) of Z = {(x; r): sum x = 0, sum r = 0}."""
    A = np.zeros((2, 2 * n))
    A[0, :n] = 1.0
    A[1, n:] = 1.0
    return scipy.linalg.null_space(A)  # (2n, 2n - 2)


def min_eig_on_Z(n: int) -> float:
    """Minimum of <Phi z, z> / |z|^2 over Z.

    Computed by dense eigendecomposition of Phi restricted to an
    orthonormal basis of Z, and cross-asserted against the closed form
    min(n^2 sin(2 pi / n), 2 n) = 2 n.
    """
    phi = build_phi(n)
    Q = zero_mean_basis(n)
    restricted = Q.T @ phi.matrix @ Q
    value = float(np.linalg.eigvalsh(restricted)[0])
    closed = min(n * n * math.sin(2.0 * math.pi / n), 2.0 * n)
    if abs(value - closed) > 1e-9 * max(1.0, closed):
        raise AssertionError(
            f"restricted minimum eigenvalue {value!r} disagrees with closed form {closed!r}"
        )
    if value <= 0.0:
        raise AssertionError(f"coercivity constant on Z is not positive: {value!r}")
    return value
