"""File formats and deterministic serialization.

* Polygon CSV: one vertex per line as `x,y`; `#` starts a comment.
* ManifoldPoint JSON: {"n": int, "x": [...], "r": [...]}.
* Sample batches: JSON lines, one manifold point per line with convexity
  flag and constraint residuals.
* Reports: JSON with fixed key order and floats printed with 17
  significant digits, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import PolygonLabError
from .manifold import residuals
from .polygon import ManifoldPoint, VertexPolygon, batch_convex, from_vertices


# ---------------------------------------------------------------------------
# canonical JSON
# ---------------------------------------------------------------------------

def _format_float(x: float) -> str:
    if x != x:
        return "NaN"
    if x == float("inf"):
        return "Infinity"
    if x == float("-inf"):
        return "-Infinity"
    return format(x, ".17g")


def dumps(obj, compact: bool = False) -> str:
    """Deterministic JSON: insertion-ordered keys, floats at 17 significant
    digits (round-trippable in IEEE double)."""

    def enc(o, ind):
        nl = "" if compact else "\n"
        tab = "" if compact else " " * (ind + 2)
        close = "" if compact else " " * ind
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f'{tab}{json.dumps(str(k))}: {enc(v, ind + 2)}' for k, v in o.items()]
            return "{" + nl + ("," + nl).join(items) + nl + close + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            seq = list(o)
            if not seq:
                return "[]"
            flat = all(isinstance(v, (bool, int, float, np.integer, np.floating)) for v in seq)
            if flat:
                return "[" + ", ".join(enc(v, ind) for v in seq) + "]"
            items = [f'{tab}{enc(v, ind + 2)}' for v in seq]
            return "[" + nl + ("," + nl).join(items) + nl + close + "]"
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _format_float(float(o))
        if o is None:
            return "null"
        if isinstance(o, str):
            return json.dumps(o)
        raise TypeError(f"cannot serialize {type(o)!r}")

    return enc(obj, 0) + "\n"


# ---------------------------------------------------------------------------
# polygon CSV
# ---------------------------------------------------------------------------

def read_polygon_csv(path) -> VertexPolygon:
    pts = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise PolygonLabError(f"{path}:{lineno}: expected 'x,y', got {line!r}")
        try:
            pts.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise PolygonLabError(f"{path}:{lineno}: {exc}") from exc
    return from_vertices(pts)


def write_polygon_csv(path, P: VertexPolygon) -> None:
    lines = [f"{_format_float(vx)},{_format_float(vy)}" for vx, vy in P.vertices]
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# manifold point JSON
# ---------------------------------------------------------------------------

def manifold_point_to_dict(m: ManifoldPoint) -> dict:
    return {"n": m.n, "x": list(map(float, m.x)), "r": list(map(float, m.r))}


def manifold_point_from_dict(d: dict) -> ManifoldPoint:
    try:
        n = int(d["n"])
        x = np.asarray(d["x"], dtype=float)
        r = np.asarray(d["r"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise PolygonLabError(f"malformed manifold point record: {exc}") from exc
    if len(x) != n or len(r) != n:
        raise PolygonLabError(f"manifold point record has n={n} but {len(x)} angles, {len(r)} radii")
    return ManifoldPoint(x=x, r=r)


def read_manifold_point_json(path) -> ManifoldPoint:
    return manifold_point_from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# sample batches (JSON lines)
# ---------------------------------------------------------------------------

def sample_records(X: np.ndarray, R: np.ndarray) -> list:
    """One record per sampled point: coordinates, convexity flag, residuals."""
    convex = batch_convex(X, R)
    out = []
    for x, r, cv in zip(X, R, convex):
        out.append({
            "n": len(x),
            "x": list(map(float, x)),
            "r": list(map(float, r)),
            "convex": bool(cv),
            "residuals": residuals(x, r).as_dict(),
        })
    return out


def write_jsonl(path, records) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(dumps(rec, compact=True))
