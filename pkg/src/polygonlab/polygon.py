"""Polygon representations and scalar geometric functionals.

Two coordinate systems are used throughout:

* vertex coordinates: an ordered, counterclockwise list of planar points;
* central coordinates (x; r): the angles x_i subtended at the vertex
  barycenter by consecutive radius vectors, and the radii r_i from the
  barycenter to the vertices.

A ManifoldPoint is a central-coordinate pair normalized so that
sum(x) = 2*pi, sum(r) = n and the vertex barycenter sits at the origin.
All functionals (perimeter, area, deficit, variances, the stability
functional) are available in both systems and cross-checked.

Indexing is periodic mod n everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BarycenterOutside,
    DegenerateZeroArea,
    DuplicateConsecutiveVertex,
    InvalidManifoldPoint,
    NonpositiveArea,
    PolygonLabError,
    TooFewVertices,
    ZeroRadius,
)

#: absolute tolerance on each manifold constraint residual
MANIFOLD_TOL = 1e-9

#: radii (and central angles) below this are treated as degenerate
MIN_COORD = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


# ---------------------------------------------------------------------------
# vertex representation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexPolygon:
    """Ordered planar polygon, counterclockwise, n >= 3."""

    vertices: np.ndarray  # (n, 2), read-only
    convex: bool

    @property
    def n(self) -> int:
        return len(self.vertices)

    def side_vectors(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    def side_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.side_vectors(), axis=1)

    def perimeter(self) -> float:
        return float(self.side_lengths().sum())

    def signed_area(self) -> float:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        return 0.5 * float(np.sum(v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0]))

    def area(self) -> float:
        return abs(self.signed_area())

    def barycenter(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def deficit(self) -> float:
        n = self.n
        L = self.perimeter()
        return L * L - 4.0 * n * math.tan(math.pi / n) * self.area()


def _edge_crosses(vertices: np.ndarray) -> np.ndarray:
    e = np.roll(vertices, -1, axis=0) - vertices
    f = np.roll(e, -1, axis=0)
    return e[:, 0] * f[:, 1] - e[:, 1] * f[:, 0]


def from_vertices(points) -> VertexPolygon:
    """Validate a vertex list and normalize its orientation to CCW.

    Raises TooFewVertices, DuplicateConsecutiveVertex or DegenerateZeroArea.
    """
    v = np.asarray(points, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2:
        raise PolygonLabError(f"expected an (n, 2) array of points, got shape {v.shape}")
    n = len(v)
    if n < 3:
        raise TooFewVertices(f"need at least 3 vertices, got {n}")
    scale = max(1.0, float(np.abs(v).max()))
    gaps = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
    if np.any(gaps < MIN_COORD * scale):
        i = int(np.argmin(gaps))
        raise DuplicateConsecutiveVertex(f"vertices {i} and {(i + 1) % n} coincide")
    area2 = float(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - v[:, 1] * np.roll(v[:, 0], -1)))
    if abs(area2) < MIN_COORD * scale * scale:
        raise DegenerateZeroArea("polygon has (numerically) zero area")
    if area2 < 0.0:
        v = v[::-1]
    crosses = _edge_crosses(v)
    convex = bool(np.all(crosses >= -MIN_COORD * scale * scale))
    return VertexPolygon(vertices=_freeze(v), convex=convex)


# ---------------------------------------------------------------------------
# central (x; r) representation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ManifoldPoint:
    """A point (x; r) on the polygonal manifold: sum(x) = 2*pi, sum(r) = n,
    and the represented polygon's vertex barycenter is at the origin."""

    x: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        x = _freeze(self.x)
        r = _freeze(self.r)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "r", r)
        n = len(x)
        if n < 3 or len(r) != n:
            raise InvalidManifoldPoint(f"need len(x) == len(r) >= 3, got {len(x)}, {len(r)}")
        if np.any(x < MIN_COORD):
            raise InvalidManifoldPoint("nonpositive central angle")
        if np.any(r < MIN_COORD):
            raise ZeroRadius("nonpositive radius")
        res = _residuals(x, r)
        worst = max(abs(v) for v in res)
        if worst > MANIFOLD_TOL:
            raise InvalidManifoldPoint(f"constraint residual {worst:.3e} exceeds {MANIFOLD_TOL:.0e}")

    @property
    def n(self) -> int:
        return len(self.x)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.r])


def _residuals(x: np.ndarray, r: np.ndarray) -> tuple:
    n = len(x)
    theta = np.concatenate([[0.0], np.cumsum(x[:-1])])
    return (
        float(x.sum() - 2.0 * math.pi),
        float(r.sum() - n),
        float(np.dot(r, np.cos(theta))),
        float(np.dot(r, np.sin(theta))),
    )


def star_point(n: int) -> ManifoldPoint:
    """The regular-polygon point: equal angles 2*pi/n, unit radii."""
    x = np.full(n, 2.0 * math.pi / n)
    x[-1] = 2.0 * math.pi - x[:-1].sum()  # exact angle sum in floating point
    return ManifoldPoint(x=x, r=np.ones(n))


def star_vector(n: int) -> np.ndarray:
    p = star_point(n)
    return p.as_vector()


def central_coordinates(P: VertexPolygon):
    """Raw central coordinates (x, r) of P at its vertex barycenter.

    No normalization is applied: sum(r) is whatever the geometry gives.
    Raises BarycenterOutside when the polygon is not star shaped about the
    barycenter (signed central angles not all positive, or not summing to
    a full turn), and ZeroRadius when a vertex coincides with the barycenter.
    """
    v = P.vertices
    rel = v - v.mean(axis=0)
    r = np.linalg.norm(rel, axis=1)
    size = max(1.0, float(r.max(initial=0.0)))
    if np.any(r < MIN_COORD * size):
        raise ZeroRadius("a vertex coincides with the barycenter")
    nxt = np.roll(rel, -1, axis=0)
    cross = rel[:, 0] * nxt[:, 1] - rel[:, 1] * nxt[:, 0]
    dot = np.sum(rel * nxt, axis=1)
    x = np.arctan2(cross, dot)
    if np.any(x <= 0.0):
        raise BarycenterOutside("polygon is not star shaped about its vertex barycenter")
    if abs(x.sum() - 2.0 * math.pi) > 1e-9:
        raise BarycenterOutside("central angles do not sum to a full turn")
    return x, r


def to_manifold_point(P: VertexPolygon):
    """Map a polygon to its manifold representative.

    Returns (m, scale) where scale = n / sum(raw radii). Lengths in the
    manifold picture are the original ones multiplied by scale, so the
    deficit and the radius variance pick up a factor scale**2 while the
    central-angle variance is unchanged.
    """
    x, r_raw = central_coordinates(P)
    s = float(r_raw.sum())
    scale = P.n / s
    return ManifoldPoint(x=x, r=r_raw * scale), scale


def to_vertices(m: ManifoldPoint) -> VertexPolygon:
    """Place the polygon of m in the plane with its barycenter at the origin:
    A_i = r_i * (cos theta_i, sin theta_i), theta_i = x_1 + ... + x_{i-1}."""
    theta = np.concatenate([[0.0], np.cumsum(m.x[:-1])])
    v = np.column_stack([m.r * np.cos(theta), m.r * np.sin(theta)])
    return from_vertices(v)


# ---------------------------------------------------------------------------
# scalar functionals
# ---------------------------------------------------------------------------

def side_lengths(m: ManifoldPoint) -> np.ndarray:
    """l_i = sqrt(r_{i+1}^2 + r_i^2 - 2 r_{i+1} r_i cos x_i)."""
    return _side_lengths_xr(m.x, m.r)


def _side_lengths_xr(x, r):
    rn = np.roll(r, -1)
    sq = rn * rn + r * r - 2.0 * rn * r * np.cos(x)
    return np.sqrt(np.maximum(sq, 0.0))


def _pi(dtype) -> float:
    """pi at the working precision (extended precision passes through)."""
    return 4 * np.arctan(np.asarray(1, dtype=dtype))


def deficit_xr(x, r):
    """Deficit L^2 - 4 n tan(pi/n) |P| in central coordinates.

    Pure formula: defined for any (x; r) near the manifold, not only on it.
    The dtype of the inputs is preserved, so the finite-difference oracle
    can evaluate it in extended precision.
    """
    x = np.asarray(x)
    r = np.asarray(r)
    n = len(x)
    L = _side_lengths_xr(x, r).sum()
    twice_area = (r * np.roll(r, -1) * np.sin(x)).sum()
    return L * L - 2 * n * np.tan(_pi(x.dtype) / n) * twice_area


def phi_xr(x, r):
    """The stability functional n^2 (|P| sigma_a^2 + sigma_r^2), written
    without divisions so it extends off the manifold:

        1/2 (sum r_i r_{i+1} sin x_i) (n sum x_i^2 - (sum x_i)^2)
        + n sum r_i^2 - (sum r_i)^2.
    """
    x = np.asarray(x)
    r = np.asarray(r)
    n = len(x)
    twice_area = (r * np.roll(r, -1) * np.sin(x)).sum()
    return (
        0.5 * twice_area * (n * (x * x).sum() - x.sum() ** 2)
        + n * (r * r).sum() - r.sum() ** 2
    )


def deficit_of_vector(z):
    """deficit_xr on a stacked (x; r) vector of length 2n."""
    n = len(z) // 2
    return deficit_xr(z[:n], z[n:])


def phi_of_vector(z):
    """phi_xr on a stacked (x; r) vector of length 2n."""
    n = len(z) // 2
    return phi_xr(z[:n], z[n:])


@dataclass(frozen=True)
class PolygonSummary:
    """All scalar functionals of one polygon, in one pass."""

    n: int
    perimeter: float
    area: float
    side_square_sum: float
    deficit: float
    side_variance: float
    radius_variance: float
    angle_variance: float
    phi: float

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "perimeter": self.perimeter,
            "area": self.area,
            "side_square_sum": self.side_square_sum,
            "deficit": self.deficit,
            "side_variance": self.side_variance,
            "radius_variance": self.radius_variance,
            "angle_variance": self.angle_variance,
            "phi": self.phi,
        }


def summary_xr(x, r) -> PolygonSummary:
    """PolygonSummary from raw central coordinates (any radius scale)."""
    x = np.asarray(x, dtype=float)
    r = np.asarray(r, dtype=float)
    n = len(x)
    l = _side_lengths_xr(x, r)
    L = float(l.sum())
    S = float((l * l).sum())
    area = 0.5 * float((r * np.roll(r, -1) * np.sin(x)).sum())
    if area <= 0.0:
        raise NonpositiveArea(f"area {area:.3e} is not positive")
    delta = L * L - 4.0 * n * math.tan(math.pi / n) * area
    return PolygonSummary(
        n=n,
        perimeter=L,
        area=area,
        side_square_sum=S,
        deficit=delta,
        side_variance=float(np.var(l)),
        radius_variance=float(np.var(r)),
        angle_variance=float(np.var(x)),
        phi=n * n * (area * float(np.var(x)) + float(np.var(r))),
    )


def summary(m: ManifoldPoint) -> PolygonSummary:
    """Summary of a manifold point, with an internal cross-check of the
    deficit against the vertex-space (shoelace + perimeter) computation."""
    s = summary_xr(m.x, m.r)
    P = to_vertices(m)
    delta_v = P.deficit()
    tol = 1e-9 * max(1.0, s.perimeter ** 2)
    if abs(delta_v - s.deficit) > tol:
        raise PolygonLabError(
            f"deficit cross-check failed: central {s.deficit!r} vs vertex {delta_v!r}"
        )
    return s


def summary_of_vertices(P: VertexPolygon) -> PolygonSummary:
    """Summary of a polygon in its own scale (no radius renormalization)."""
    x, r = central_coordinates(P)
    return summary_xr(x, r)


# ---------------------------------------------------------------------------
# batch evaluation (used by samplers and the verification sweeps)
# ---------------------------------------------------------------------------

def batch_metrics(X: np.ndarray, R: np.ndarray) -> dict:
    """Vectorized functionals for a batch of central-coordinate rows.

    X, R: arrays of shape (m, n). Returns a dict of length-m arrays with
    keys perimeter, area, side_square_sum, deficit, side_variance,
    radius_variance, angle_variance, phi, convex.
    """
    X = np.asarray(X, dtype=float)
    R = np.asarray(R, dtype=float)
    n = X.shape[1]
    Rn = np.roll(R, -1, axis=1)
    lsq = np.maximum(Rn * Rn + R * R - 2.0 * Rn * R * np.cos(X), 0.0)
    l = np.sqrt(lsq)
    L = l.sum(axis=1)
    S = lsq.sum(axis=1)
    area = 0.5 * (R * Rn * np.sin(X)).sum(axis=1)
    delta = L * L - 4.0 * n * math.tan(math.pi / n) * area
    return {
        "perimeter": L,
        "area": area,
        "side_square_sum": S,
        "deficit": delta,
        "side_variance": l.var(axis=1),
        "radius_variance": R.var(axis=1),
        "angle_variance": X.var(axis=1),
        "phi": n * n * (area * X.var(axis=1) + R.var(axis=1)),
        "convex": batch_convex(X, R),
    }


def batch_convex(X: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Convexity flags for a batch of central-coordinate rows: all cross
    products of consecutive edge vectors of the placed polygon >= 0."""
    theta = np.concatenate([np.zeros((X.shape[0], 1)), np.cumsum(X[:, :-1], axis=1)], axis=1)
    vx = R * np.cos(theta)
    vy = R * np.sin(theta)
    ex = np.roll(vx, -1, axis=1) - vx
    ey = np.roll(vy, -1, axis=1) - vy
    cross = ex * np.roll(ey, -1, axis=1) - ey * np.roll(ex, -1, axis=1)
    return np.all(cross >= 0.0, axis=1)
