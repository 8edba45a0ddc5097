"""Pocket flips: convexifying a simple polygon by reflecting pockets
across their convex-hull edges.

A pocket is a maximal chain of polygon vertices strictly inside the convex
hull, bounded by two hull vertices whose connecting hull edge is the
pocket's lid. Reflecting the chain across the lid line is an isometry of
the chain that fixes the lid endpoints, so the perimeter and the multiset
of side lengths are preserved while the enclosed area strictly grows.
Finitely many flips convexify any simple polygon; a flip budget guards
against the absence of a uniform bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    FlipBudgetExhausted,
    NotSimple,
    ReflectionCreatesSelfIntersection,
)
from .polygon import VertexPolygon, from_vertices

__all__ = ["Pocket", "FlipStep", "FlipTrace", "is_simple", "pockets", "flip", "convexify"]

_COLLINEAR_TOL = 1e-12


@dataclass(frozen=True)
class Pocket:
    """Indices of the chain strictly inside the hull, plus the lid edge
    (indices of the two hull vertices bounding the chain)."""
    chain: tuple
    lid: tuple  # (i, j) vertex indices


@dataclass(frozen=True)
class FlipStep:
    pocket_chain: tuple
    lid: tuple
    perimeter: float
    area: float
    deficit: float

    def as_dict(self) -> dict:
        return {"pocket": list(self.pocket_chain), "lid": list(self.lid),
                "perimeter": self.perimeter, "area": self.area, "deficit": self.deficit}


@dataclass(frozen=True)
class FlipTrace:
    polygons: tuple          # VertexPolygon sequence, initial first
    steps: tuple             # FlipStep per polygon (including the initial state)

    @property
    def flips(self) -> int:
        return len(self.polygons) - 1


def _segments_intersect(p1, p2, p3, p4) -> bool:
    """Proper or improper intersection of segments p1p2 and p3p4."""
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(v) < _COLLINEAR_TOL:
            return 0
        return 1 if v > 0 else -1

    def on_segment(a, b, c):
        return (min(a[0], b[0]) - _COLLINEAR_TOL <= c[0] <= max(a[0], b[0]) + _COLLINEAR_TOL
                and min(a[1], b[1]) - _COLLINEAR_TOL <= c[1] <= max(a[1], b[1]) + _COLLINEAR_TOL)

    o1, o2 = orient(p1, p2, p3), orient(p1, p2, p4)
    o3, o4 = orient(p3, p4, p1), orient(p3, p4, p2)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and on_segment(p1, p2, p3):
        return True
    if o2 == 0 and on_segment(p1, p2, p4):
        return True
    if o3 == 0 and on_segment(p3, p4, p1):
        return True
    if o4 == 0 and on_segment(p3, p4, p2):
        return True
    return False


def is_simple(P: VertexPolygon) -> bool:
    """Quadratic-time non-self-intersection test; adjacent edges share only
    their common endpoint."""
    v = P.vertices
    n = len(v)
    for i in range(n):
        a1, a2 = v[i], v[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if _segments_intersect(a1, a2, v[j], v[(j + 1) % n]):
                return False
    return True


def _hull_indices(v: np.ndarray) -> list:
    """Indices of the strict convex hull (collinear boundary points merged
    away), returned in the polygon's own cyclic vertex order."""
    pts = sorted(range(len(v)), key=lambda i: (v[i, 0], v[i, 1]))

    def cross(o, a, b):
        return ((v[a, 0] - v[o, 0]) * (v[b, 1] - v[o, 1])
                - (v[a, 1] - v[o, 1]) * (v[b, 0] - v[o, 0]))

    scale = max(1.0, float(np.abs(v).max())) ** 2
    lower, upper = [], []
    for i in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= _COLLINEAR_TOL * scale:
            lower.pop()
        lower.append(i)
    for i in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= _COLLINEAR_TOL * scale:
            upper.pop()
        upper.append(i)
    hull = lower[:-1] + upper[:-1]
    # rotate so the hull follows the polygon's vertex order starting at the
    # smallest polygon index on the hull
    hull_set = set(hull)
    ordered = [i for i in range(len(v)) if i in hull_set]
    return ordered


def pockets(P: VertexPolygon) -> list:
    """Maximal chains of vertices strictly inside the convex hull, each
    bounded by a hull edge (the lid). Empty for convex polygons."""
    if not is_simple(P):
        raise NotSimple("polygon is self-intersecting")
    v = P.vertices
    n = len(v)
    hull = _hull_indices(v)
    if len(hull) == n:
        return []
    out = []
    for a, b in zip(hull, hull[1:] + hull[:1]):
        chain = []
        i = (a + 1) % n
        while i != b:
            chain.append(i)
            i = (i + 1) % n
        if not chain:
            continue
        # a chain lying entirely on the lid line is a merged-collinear
        # artifact, not a pocket: reflecting it would gain no area
        lid_dir = v[b] - v[a]
        offs = [abs((v[c, 0] - v[a, 0]) * lid_dir[1] - (v[c, 1] - v[a, 1]) * lid_dir[0])
                for c in chain]
        if max(offs) <= _COLLINEAR_TOL * max(1.0, float(np.abs(v).max())) ** 2:
            continue
        out.append(Pocket(chain=tuple(chain), lid=(a, b)))
    return out


def flip(P: VertexPolygon, pocket: Pocket) -> VertexPolygon:
    """Reflect the pocket chain across the lid line. Preserves the
    perimeter and every side length; strictly increases the area."""
    v = P.vertices.copy()
    p = v[pocket.lid[0]]
    q = v[pocket.lid[1]]
    d = (q - p) / np.linalg.norm(q - p)
    for i in pocket.chain:
        w = v[i] - p
        v[i] = p + 2.0 * np.dot(w, d) * d - w
    flipped = from_vertices(v)
    if not is_simple(flipped):
        raise ReflectionCreatesSelfIntersection(
            f"flip of pocket {pocket.chain} produced a self-intersection")
    return flipped


def _step_record(P: VertexPolygon, pocket: Pocket | None) -> FlipStep:
    return FlipStep(
        pocket_chain=pocket.chain if pocket else (),
        lid=pocket.lid if pocket else (),
        perimeter=P.perimeter(),
        area=P.area(),
        deficit=P.deficit(),
    )


def convexify(P: VertexPolygon, max_flips: int = 10_000):
    """Flip the first pocket (lowest starting index) until convex.

    Returns (convex polygon, FlipTrace). Raises FlipBudgetExhausted when
    the budget runs out: termination is guaranteed mathematically, but no
    uniform bound on the number of flips exists.
    """
    if max_flips < 1:
        raise ValueError("max_flips must be at least 1")
    polys = [P]
    steps = []
    current = P
    for _ in range(max_flips):
        pks = pockets(current)
        if not pks:
            steps.append(_step_record(current, None))
            return current, FlipTrace(polygons=tuple(polys), steps=tuple(steps))
        pk = min(pks, key=lambda p: p.chain[0])
        steps.append(_step_record(current, pk))
        current = flip(current, pk)
        polys.append(current)
    if not pockets(current):
        steps.append(_step_record(current, None))
        return current, FlipTrace(polygons=tuple(polys), steps=tuple(steps))
    raise FlipBudgetExhausted(f"still nonconvex after {max_flips} flips")
