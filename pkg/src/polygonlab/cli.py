"""Batch front end.

Subcommands: verify, sample, estimate-cn, sharpness, spectral,
derivatives, convexify, scaling. Reports are deterministic JSON (or CSV
where a summary table is more useful); every randomized subcommand records
its seed in the artifact. Exit codes: 0 all checks pass, 1 a verification
check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import circulant, derivatives, figures, io, lab, manifold, polygon
from .convexify import convexify as convexify_polygon
from .errors import FlipBudgetExhausted, PolygonLabError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


def _parse_n_list(text: str) -> list:
    """'5', '3,4,7' or '3-12' (inclusive)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out or min(out) < 3:
        raise ValueError(f"invalid n specification {text!r} (need n >= 3)")
    return out


def _emit(args, payload: dict) -> None:
    text = io.dumps(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_csv(args, header: list, rows: list) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(io._format_float(v) if isinstance(v, float) else str(v)
                              for v in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_polygon(args) -> polygon.VertexPolygon:
    if args.input is None:
        raise PolygonLabError("--input is required for this subcommand")
    return io.read_polygon_csv(args.input)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    if args.input and args.input.endswith(".json"):
        m = io.read_manifold_point_json(args.input)
        scale = 1.0
    else:
        P = _load_polygon(args)
        m, scale = polygon.to_manifold_point(P)
    constants = lab.Constants(c_n=args.cn, c4=args.c4)
    report = lab.verify(m, constants=constants, scale=scale,
                        membership_tol=max(args.tol, 10 * polygon.MANIFOLD_TOL))
    payload = {"subcommand": "verify", "input": args.input, "scale": scale,
               "report": report.as_dict()}
    _emit(args, payload)
    if args.figures:
        figures.polygon_figure(m, args.figures)
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILED


def cmd_sample(args) -> int:
    X, R = manifold.sample_batch(args.n, args.count, seed=args.seed)
    records = io.sample_records(X, R)
    if args.out:
        io.write_jsonl(args.out, records)
    else:
        for rec in records:
            sys.stdout.write(io.dumps(rec, compact=True))
    bad = sum(1 for rec in records
              if max(abs(v) for v in rec["residuals"].values()) >= polygon.MANIFOLD_TOL)
    return EXIT_OK if bad == 0 else EXIT_CHECK_FAILED


def cmd_estimate_cn(args) -> int:
    est = lab.estimate_cn(args.n, budget=args.budget, seed=args.seed)
    sigma = derivatives.sigma_estimate(args.n)
    min_z = circulant.min_eig_on_Z(args.n)
    if args.format == "csv":
        _emit_csv(args, ["n", "c_hat", "sigma", "min_eig_on_Z"],
                  [[args.n, est.c_hat, sigma, min_z]])
    else:
        payload = {"subcommand": "estimate-cn", "seed": args.seed, "budget": args.budget,
                   "estimate": est.as_dict(), "sigma": sigma, "min_eig_on_Z": min_z}
        _emit(args, payload)
    if args.figures:
        rng = np.random.default_rng(args.seed)
        X, R = manifold.sample_convex_batch(args.n, 2000, seed=rng)
        figures.ratio_histogram_figure(lab._ratio_batch(X, R), est.rayleigh_bound, args.figures)
    ok = est.c_hat > 0 and np.isfinite(est.c_hat) and not est.budget_exhausted
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_sharpness(args) -> int:
    rng = np.random.default_rng(args.seed)
    basis = manifold.tangent_basis_at_star(args.n)
    hess = derivatives.deficit_hessian_at_star(args.n)
    results = []
    for _ in range(args.directions):
        w = rng.normal(size=basis.dim) @ basis.vectors
        results.append(lab.sharpness_probe(args.n, w, hessian=hess))
    records = []
    all_ok = True
    for res in results:
        rel = abs(res.ratios[-1] - res.rayleigh) / res.rayleigh
        ok = res.limit > 0 and rel <= 0.02
        all_ok &= ok
        rec = res.as_dict()
        rec["rel_mismatch_at_tmin"] = rel
        rec["pass"] = ok
        records.append(rec)
    _emit(args, {"subcommand": "sharpness", "n": args.n, "seed": args.seed,
                 "all_pass": all_ok, "probes": records})
    if args.figures:
        figures.sharpness_figure(results, args.figures)
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def cmd_spectral(args) -> int:
    sys_ = circulant.build_circulant(args.n)
    payload = {
        "subcommand": "spectral",
        "n": args.n,
        "eigenvalues": list(map(float, sys_.eigenvalues)),
        "basis_norms": [float(np.linalg.norm(v)) for v in sys_.basis],
        "min_eig_on_Z": circulant.min_eig_on_Z(args.n),
    }
    _emit(args, payload)
    if args.figures:
        figures.spectrum_figure(sys_.eigenvalues, args.figures)
    return EXIT_OK


def cmd_derivatives(args) -> int:
    reports = []
    all_ok = True
    for n in _parse_n_list(args.n):
        grads = derivatives.verify_gradients(n, h=args.step)
        hess = derivatives.verify_hessian_phi(n)
        s4 = derivatives.sigma_estimate(n, 1e-4)
        s5 = derivatives.sigma_estimate(n, 1e-5)
        stable = abs(s4 - s5) / s4 <= 1e-3
        ok = (grads["phi_grad_max_abs"] <= 1e-6
              and grads["deficit_grad_max_abs_error"] <= 1e-6
              and hess.hessian_max_rel_error <= 1e-5
              and s4 > 0 and stable)
        all_ok &= ok
        reports.append({
            "n": n,
            "phi_grad_max_abs": grads["phi_grad_max_abs"],
            "deficit_grad_max_abs_error": grads["deficit_grad_max_abs_error"],
            "phi_hessian_max_rel_error": hess.hessian_max_rel_error,
            "sigma": s4,
            "sigma_step_rel_drift": abs(s4 - s5) / s4,
            "pass": ok,
        })
    _emit(args, {"subcommand": "derivatives", "step": args.step,
                 "all_pass": all_ok, "reports": reports})
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def cmd_convexify(args) -> int:
    P = _load_polygon(args)
    try:
        final, trace = convexify_polygon(P, max_flips=args.max_flips)
    except FlipBudgetExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    if args.trace:
        io.write_jsonl(args.trace, [s.as_dict() for s in trace.steps])
    payload = {
        "subcommand": "convexify",
        "input": args.input,
        "flips": trace.flips,
        "perimeter_initial": trace.steps[0].perimeter,
        "perimeter_final": trace.steps[-1].perimeter,
        "deficit_initial": trace.steps[0].deficit,
        "deficit_final": trace.steps[-1].deficit,
        "final_vertices": [list(map(float, v)) for v in final.vertices],
    }
    _emit(args, payload)
    if args.figures:
        figures.flip_trace_figure(trace, args.figures)
    drift = abs(payload["perimeter_final"] - payload["perimeter_initial"])
    ok = final.convex and drift <= 1e-9 * max(1.0, payload["perimeter_initial"])
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_scaling(args) -> int:
    P = _load_polygon(args)
    report = lab.scaling_check(P, args.alpha)
    alphas = [1.0, 1e-1, 1e-2, 1e-3]
    x, r = polygon.central_coordinates(P)
    ratios = []
    for a in alphas:
        s = polygon.summary_xr(x, a * r)
        ratios.append(s.angle_variance / s.deficit if s.deficit > 0 else float("inf"))
    payload = {"subcommand": "scaling", "input": args.input,
               "report": report.as_dict(),
               "ratio_growth": {"alphas": alphas, "angle_variance_over_deficit": ratios}}
    _emit(args, payload)
    if args.figures:
        figures.scaling_figure(P, alphas, ratios, args.figures)
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polygonlab",
        description="Numerical laboratory for the sharp quantitative polygonal "
                    "isoperimetric inequality.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, n=False, n_list=False, seed=False, figures=True):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--tol", type=float, default=1e-9, help="constraint tolerance")
        if n:
            p.add_argument("--n", type=int, required=True, help="number of vertices")
        if n_list:
            p.add_argument("--n", default="3-8", help="n values, e.g. '5', '3,4,7' or '3-12'")
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if figures:
            p.add_argument("--figures", metavar="DIR", help="also render figures into DIR")

    p = sub.add_parser("verify", help="evaluate every inequality on one polygon")
    p.add_argument("--input", help="polygon CSV (or manifold-point .json)")
    p.add_argument("--cn", type=float, help="constant for the main inequality")
    p.add_argument("--c4", type=float, help="constant for the side-variance inequality")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="draw manifold points as JSON lines")
    p.add_argument("--count", type=int, default=100)
    common(p, n=True, seed=True, figures=False)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate-cn", help="estimate the sharp constant")
    p.add_argument("--budget", type=int, default=20000)
    common(p, n=True, seed=True)
    p.set_defaults(func=cmd_estimate_cn)

    p = sub.add_parser("sharpness", help="probe the ratio limit along tangent curves")
    p.add_argument("--directions", type=int, default=20)
    common(p, n=True, seed=True)
    p.set_defaults(func=cmd_sharpness)

    p = sub.add_parser("spectral", help="circulant eigenvalues and coercivity on Z")
    common(p, n=True)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("derivatives", help="finite-difference derivative checks and sigma")
    p.add_argument("--step", type=float, default=derivatives.DEFAULT_STEP)
    common(p, n_list=True, figures=False)
    p.set_defaults(func=cmd_derivatives)

    p = sub.add_parser("convexify", help="convexify a simple polygon by pocket flips")
    p.add_argument("--input", help="polygon CSV")
    p.add_argument("--max-flips", type=int, default=10_000)
    p.add_argument("--trace", help="write per-flip records to this JSONL file")
    common(p)
    p.set_defaults(func=cmd_convexify)

    p = sub.add_parser("scaling", help="verify the radius-dilation scaling laws")
    p.add_argument("--input", help="polygon CSV")
    p.add_argument("--alpha", type=float, default=2.0)
    common(p)
    p.set_defaults(func=cmd_scaling)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PolygonLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
