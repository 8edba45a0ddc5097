"""Matplotlib rendering for the report paths.

Every CLI subcommand can write figures next to its JSON/CSV output; these
helpers each save one PNG and return the path written.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .polygon import ManifoldPoint, VertexPolygon, to_vertices  # noqa: E402

DPI = 150


def _save(fig, outdir, name) -> Path:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / name
    fig.savefig(path, dpi=DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def _draw_polygon(ax, P: VertexPolygon, **kwargs):
    v = np.vstack([P.vertices, P.vertices[:1]])
    ax.plot(v[:, 0], v[:, 1], **kwargs)
    ax.set_aspect("equal")


def polygon_figure(P, outdir, name="polygon.png") -> Path:
    if isinstance(P, ManifoldPoint):
        P = to_vertices(P)
    fig, ax = plt.subplots(figsize=(5, 5))
    _draw_polygon(ax, P, marker="o", ms=3, lw=1.2, color="tab:blue")
    bc = P.barycenter()
    ax.plot([bc[0]], [bc[1]], "+", color="tab:red")
    ax.set_title(f"n = {P.n}, convex = {P.convex}")
    return _save(fig, outdir, name)


def spectrum_figure(eigenvalues, outdir, name="spectrum.png") -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.2))
    k = np.arange(len(eigenvalues))
    ax.stem(k, eigenvalues)
    ax.set_xlabel("mode index")
    ax.set_ylabel("eigenvalue")
    ax.set_title("circulant spectrum")
    return _save(fig, outdir, name)


def sharpness_figure(results, outdir, name="sharpness.png") -> Path:
    """results: iterable of SharpnessResult for one n."""
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for res in results:
        ax.loglog(res.t_values, res.ratios, "o-", lw=0.8, ms=3, alpha=0.6)
        ax.axhline(res.rayleigh, color="gray", lw=0.5, ls="--", alpha=0.5)
    ax.set_xlabel("curve parameter t")
    ax.set_ylabel("stability ratio")
    ax.set_title("ratio along tangent curves vs Rayleigh limits")
    return _save(fig, outdir, name)


def ratio_histogram_figure(ratios, rayleigh, outdir, name="ratios.png") -> Path:
    ratios = np.asarray(ratios, dtype=float)
    ratios = ratios[np.isfinite(ratios)]
    fig, ax = plt.subplots(figsize=(5.5, 4))
    if len(ratios):
        ax.hist(ratios, bins=60, color="tab:blue", alpha=0.75)
    ax.axvline(rayleigh, color="tab:red", lw=1.2, label="Rayleigh limit at the regular point")
    ax.set_xlabel("stability ratio")
    ax.set_ylabel("count")
    ax.legend(fontsize=8)
    return _save(fig, outdir, name)


def flip_trace_figure(trace, outdir, name="convexify.png") -> Path:
    fig, axes = plt.subplots(1, 2, figsize=(10, 4.2))
    _draw_polygon(axes[0], trace.polygons[0], lw=1.0, color="tab:red", label="input")
    _draw_polygon(axes[0], trace.polygons[-1], lw=1.2, color="tab:green", label="convexified")
    axes[0].legend(fontsize=8)
    axes[0].set_title(f"{trace.flips} flip(s)")
    deficits = [s.deficit for s in trace.steps]
    axes[1].plot(deficits, "o-", ms=3)
    axes[1].set_xlabel("flip")
    axes[1].set_ylabel("deficit")
    axes[1].set_title("deficit along the trace")
    return _save(fig, outdir, name)


def scaling_figure(P, alphas, ratios, outdir, name="scaling.png") -> Path:
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.loglog(alphas, ratios, "o-")
    ax.set_xlabel("radius dilation")
    ax.set_ylabel("angle variance / deficit")
    ax.set_title("no bound on angle variance by the deficit alone")
    return _save(fig, outdir, name)
