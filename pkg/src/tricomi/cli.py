"""Command-line front end: constant tables, verification sweeps, eigen-solves,
bound checks and static SVG plots.

Output is deterministic: floats print with 17 significant digits, no
timestamps, and the eigensolver uses a fixed start vector.  Exit codes:
0 when every emitted report passed, 1 on a numerical failure or a failed
check (with diagnostic JSON on stderr), 2 on argument errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import eigensolver, pohozaev, verifier
from .constants import ledger
from .geometry import TricomiDomain, reflected_membership, verify_star_shaped
from .report import fmt, reports_to_csv, reports_to_jsonl

__all__ = ["main", "run"]

log = logging.getLogger("tricomi")

_VERIFY_CHECKS = ("h-profile", "g1-bounds", "g2-bounds", "starshape",
                  "integrands", "inequalities", "all")


def _setup_logging():
    level = {"error": logging.ERROR, "info": logging.INFO,
             "debug": logging.DEBUG}.get(os.environ.get("TRICOMI_LOG", "error"))
    if level is None:
        level = logging.ERROR
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _parse_range(spec: str):
    try:
        a, b, n = spec.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"range must be a:b:n with floats a, b and count n, got {spec!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("range count must be >= 1")
    if a >= 0 or b >= 0:
        raise argparse.ArgumentTypeError("range endpoints must be negative")
    return (a, b, n)


def _neg_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (v < 0.0) or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"x0 must be a finite negative real, got {v}")
    return v


def _x0_list(args, parser) -> list:
    if args.x0 is not None and args.x0_range is not None:
        parser.error("give either --x0 or --x0-range, not both")
    if args.x0 is not None:
        return [args.x0]
    if args.x0_range is not None:
        a, b, n = args.x0_range
        if n == 1:
            return [a]
        # Log-spaced sweep between the (negative) endpoints.
        return [-v for v in np.geomspace(abs(a), abs(b), n)]
    parser.error("one of --x0 or --x0-range is required")


def _write_out(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(message: str, **detail) -> int:
    payload = {"error": message}
    payload.update(detail)
    sys.stderr.write(json.dumps(payload, sort_keys=True, default=str) + "\n")
    return 1


# -- subcommands -------------------------------------------------------------

def _cmd_constants(args, parser) -> int:
    x0s = _x0_list(args, parser)
    rows = [ledger(x0).to_dict(eps=1.0) for x0 in x0s]
    if args.format == "json":
        text = json.dumps(rows[0] if len(rows) == 1 else rows,
                          sort_keys=True, indent=2, default=float) + "\n"
    elif args.format == "csv":
        keys = list(rows[0].keys())
        lines = [",".join(keys)]
        for row in rows:
            lines.append(",".join(
                "" if row[k] is None else fmt(row[k]) for k in keys))
        text = "\n".join(lines) + "\n"
    else:
        parser.error("constants supports --format json or csv")
    _write_out(text, args.out)
    return 0


def _verify_one(check: str, x0: float, grid: int, reflected: bool):
    if check == "h-profile":
        return [verifier.verify_h_profile(x0, grid)]
    if check == "g1-bounds":
        return [verifier.verify_G1_bounds(x0, grid)]
    if check == "g2-bounds":
        return [verifier.verify_G2_bounds(x0, grid)]
    if check == "starshape":
        dom = TricomiDomain(x0)
        membership = reflected_membership(dom) if reflected else None
        n_pts = grid if grid < 10000 else 200
        return [verify_star_shaped(dom, n_pts, 50, membership=membership)]
    if check == "integrands":
        n = grid if grid < 10000 else 1000
        return [pohozaev.verify_integrand_equivalence(x0, n_states=n)]
    if check == "inequalities":
        n = grid if grid < 10000 else 1000
        return [pohozaev.verify_trace_inequalities(x0, n_traces=n)]
    if check == "all":
        out = []
        for c in _VERIFY_CHECKS[:-1]:
            out.extend(_verify_one(c, x0, grid, reflected))
        return out
    raise ValueError(f"unknown check {check!r}")


def _cmd_verify(args, parser) -> int:
    x0s = _x0_list(args, parser)
    jobs = args.jobs or min(os.cpu_count() or 1, len(x0s))
    log.info("verify %s over %d value(s) of x0 with %d job(s)",
             args.check, len(x0s), jobs)
    try:
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            batches = list(pool.map(
                lambda x0: _verify_one(args.check, x0, args.grid, args.reflected),
                x0s))
    except Exception as exc:  # numerical failure inside a worker
        return _fail(f"verification failed: {exc}", check=args.check)
    reports = [r for batch in batches for r in batch]
    if args.tol is not None:
        for r in reports:
            r.passed = r.worst_margin >= -args.tol
    text = reports_to_csv(reports) if args.format == "csv" else reports_to_jsonl(reports)
    _write_out(text, args.out)
    if all(r.passed for r in reports):
        return 0
    return _fail("one or more checks failed",
                 failed=[r.claim_id for r in reports if not r.passed])


def _solve(x0: float, nx: int, ny: int, count: int):
    dom = TricomiDomain(x0)
    grid = eigensolver.Grid.build(dom, nx, ny)
    op = eigensolver.assemble(dom, grid)
    pairs, complex_diag = eigensolver.solve_real_spectrum(op, count)
    return dom, grid, pairs, complex_diag


def _cmd_eigen(args, parser) -> int:
    if args.x0 is None:
        parser.error("eigen requires --x0")
    try:
        dom, grid, pairs, complex_diag = _solve(args.x0, args.nx, args.ny, args.count)
    except Exception as exc:
        return _fail(f"eigensolve failed: {exc}", x0=args.x0)
    if not pairs:
        return _fail("no real eigenvalue found", x0=args.x0,
                     complex_pairs=[str(c) for c in complex_diag])
    if args.format == "csv":
        if not args.out:
            parser.error("eigen --format csv writes the principal field; give --out")
        eigensolver.write_field_csv(args.out, grid, pairs[0].field)
    else:
        summary = {
            "x0": args.x0,
            "nx": args.nx,
            "ny": args.ny,
            "eigenvalues": [
                {"lambda": p.lam, "residual": p.residual, "imag": p.imag}
                for p in pairs
            ],
            "complex_pairs": [str(c) for c in complex_diag],
        }
        _write_out(json.dumps(summary, sort_keys=True, indent=2, default=float) + "\n",
                   args.out)
    if all(p.residual <= 1e-8 for p in pairs):
        return 0
    return _fail("eigen residual above tolerance",
                 residuals=[p.residual for p in pairs])


def _cmd_bound(args, parser) -> int:
    if args.x0 is None:
        parser.error("bound requires --x0")
    tol = args.tol if args.tol is not None else 1e-2
    try:
        dom, grid, pairs, _ = _solve(args.x0, args.nx, args.ny, args.count)
        pairs = [p for p in pairs if p.lam > 0]
        if not pairs:
            return _fail("no positive real eigenvalue found", x0=args.x0)
        pair = pairs[0]
        norms = eigensolver.trace_norms(pair, dom, grid)
        identity = pohozaev.pohozaev_residual(pair, dom)
        bound = pohozaev.bound_check(pair, norms, ledger(args.x0), rel_tol=tol)
    except Exception as exc:
        return _fail(f"bound check failed: {exc}", x0=args.x0)
    record = {
        "x0": args.x0,
        "nx": args.nx,
        "ny": args.ny,
        "lambda": pair.lam,
        "residual": pair.residual,
        "identity": identity,
        "bound": bound,
        "passed": bool(bound["satisfied"]),
    }
    if args.format == "csv":
        text = ("x0,lambda,lhs,rhs,eps1,eps2,satisfied\n"
                + ",".join(fmt(v) for v in (
                    args.x0, pair.lam, bound["lhs"], bound["rhs"],
                    bound["eps1"], bound["eps2"], bound["satisfied"])) + "\n")
    else:
        text = json.dumps(record, sort_keys=True, indent=2, default=float) + "\n"
    _write_out(text, args.out)
    if record["passed"]:
        return 0
    return _fail("eigenfunction bound not satisfied", lhs=bound["lhs"], rhs=bound["rhs"])


# -- SVG plotting ------------------------------------------------------------

_W, _H = 800, 600
_MARGIN = 60


def _svg_open(title: str) -> list:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="28" text-anchor="middle" '
        f'font-family="monospace" font-size="16">{title}</text>',
    ]


def _axis_map(xlim, ylim):
    x0p, x1p = _MARGIN, _W - _MARGIN
    y0p, y1p = _H - _MARGIN, 40 + _MARGIN

    def to_px(x, y):
        tx = (x - xlim[0]) / (xlim[1] - xlim[0])
        ty = (y - ylim[0]) / (ylim[1] - ylim[0])
        return (x0p + tx * (x1p - x0p), y0p + ty * (y1p - y0p))

    return to_px


def _svg_axes(parts, xlim, ylim, to_px):
    ax0 = to_px(xlim[0], ylim[0])
    ax1 = to_px(xlim[1], ylim[0])
    ay1 = to_px(xlim[0], ylim[1])
    parts.append(f'<line x1="{ax0[0]:.2f}" y1="{ax0[1]:.2f}" x2="{ax1[0]:.2f}" '
                 f'y2="{ax1[1]:.2f}" stroke="black"/>')
    parts.append(f'<line x1="{ax0[0]:.2f}" y1="{ax0[1]:.2f}" x2="{ay1[0]:.2f}" '
                 f'y2="{ay1[1]:.2f}" stroke="black"/>')
    for (vx, vy), label, anchor, dy in (
            ((xlim[0], ylim[0]), f"{xlim[0]:.6g}", "middle", 20),
            ((xlim[1], ylim[0]), f"{xlim[1]:.6g}", "middle", 20),
            ((xlim[0], ylim[1]), f"{ylim[1]:.6g}", "end", -6)):
        px, py = to_px(vx, vy)
        parts.append(f'<text x="{px:.2f}" y="{py + dy:.2f}" text-anchor="{anchor}" '
                     f'font-family="monospace" font-size="12">{label}</text>')


def _polyline(xs, ys, to_px, color="steelblue"):
    pts = " ".join(f"{px:.2f},{py:.2f}" for px, py in (to_px(x, y)
                                                       for x, y in zip(xs, ys)))
    return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'


def _plot_h(x0: float) -> str:
    dom = TricomiDomain(x0)
    led = ledger(x0)
    xs = np.linspace(2.0 * x0, 0.0, 600)
    hs = np.asarray(dom.h(xs))
    pad = 0.05 * (float(np.max(hs)) - float(np.min(hs)) + 1e-12)
    xlim = (2.0 * x0, 0.0)
    ylim = (float(np.min(hs)) - pad, float(np.max(hs)) + pad)
    to_px = _axis_map(xlim, ylim)
    parts = _svg_open(f"modulus h on [2x0, 0], x0={x0:.6g}, regime {led.regime}")
    _svg_axes(parts, xlim, ylim, to_px)
    parts.append(_polyline(xs, hs, to_px))
    i = int(np.argmin(hs))
    px, py = to_px(float(xs[i]), float(hs[i]))
    parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="3" fill="crimson"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _plot_domain(x0: float) -> str:
    dom = TricomiDomain(x0)
    led = ledger(x0)
    ymax = float(dom.g(dom.x0))
    xlim = (2.0 * x0 * 1.05, -2.0 * x0 * 0.05)
    ylim = (dom.y_C * 1.1, ymax * 1.1)
    to_px = _axis_map(xlim, ylim)
    parts = _svg_open(f"normal Tricomi domain, x0={x0:.6g}, regime {led.regime}")
    _svg_axes(parts, xlim, ylim, to_px)
    colors = {"Sigma": "steelblue", "AC": "seagreen", "BC": "darkorange"}
    for kind in ("Sigma", "AC", "BC"):
        curve = dom.boundary_curve(kind)
        t = curve.params(400)
        x, y = curve.position(t)
        parts.append(_polyline(np.atleast_1d(x), np.atleast_1d(y), to_px, colors[kind]))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _plot_eigen(x0: float, nx: int, ny: int) -> str:
    dom, grid, pairs, _ = _solve(x0, nx, ny, 1)
    if not pairs:
        raise RuntimeError("no real eigenvalue found for the heat map")
    F = pairs[0].field
    led = ledger(x0)
    vmax = float(np.max(np.abs(F))) or 1.0
    xlim = (float(grid.xs[0]), float(grid.xs[-1]))
    ylim = (float(grid.ys[0]), float(grid.ys[-1]))
    to_px = _axis_map(xlim, ylim)
    parts = _svg_open(
        f"principal eigenfunction, x0={x0:.6g}, regime {led.regime}, "
        f"lambda={pairs[0].lam:.6g}")
    _svg_axes(parts, xlim, ylim, to_px)
    for i in range(grid.nx - 1):
        for j in range(grid.ny - 1):
            if not grid.inside[i, j]:
                continue
            v = F[i, j] / vmax
            r = int(255 * max(0.0, min(1.0, v)))
            b = int(255 * max(0.0, min(1.0, -v)))
            px0, py0 = to_px(float(grid.xs[i]), float(grid.ys[j + 1]))
            px1, py1 = to_px(float(grid.xs[i + 1]), float(grid.ys[j]))
            parts.append(
                f'<rect x="{px0:.2f}" y="{py0:.2f}" width="{px1 - px0:.2f}" '
                f'height="{py1 - py0:.2f}" fill="rgb({r},{255 - max(r, b)},{b})"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _cmd_plot(args, parser) -> int:
    if args.x0 is None:
        parser.error("plot requires --x0")
    try:
        if args.target == "h":
            text = _plot_h(args.x0)
        elif args.target == "domain":
            text = _plot_domain(args.x0)
        else:
            text = _plot_eigen(args.x0, args.nx, args.ny)
    except Exception as exc:
        return _fail(f"plot failed: {exc}", target=args.target, x0=args.x0)
    _write_out(text, args.out)
    return 0


# -- parser ------------------------------------------------------------------

def _add_common(sub, fmt_choices=("json", "csv")):
    sub.add_argument("--x0", type=_neg_float, default=None,
                     help="domain parameter, a negative real")
    sub.add_argument("--x0-range", type=_parse_range, default=None,
                     help="sweep a:b:n, log-spaced between negative a and b")
    sub.add_argument("--format", choices=fmt_choices, default=fmt_choices[0])
    sub.add_argument("--out", default=None, help="output path (default stdout)")
    sub.add_argument("--jobs", type=int, default=None,
                     help="parallel workers for sweeps (default: cpu count)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tricomi",
        description="Geometry, constants, boundary integrals and eigenpairs "
                    "of the Tricomi operator on the normal Tricomi domain.")
    subs = parser.add_subparsers(dest="command", required=True)

    sc = subs.add_parser("constants", help="x0-dependent constant ledger")
    _add_common(sc)

    sv = subs.add_parser("verify", help="dense-grid and randomized checks")
    sv.add_argument("check", choices=_VERIFY_CHECKS)
    _add_common(sv)
    sv.add_argument("--grid", type=int, default=100000,
                    help="sweep grid size (or sample count for randomized checks)")
    sv.add_argument("--tol", type=float, default=None,
                    help="override the pass/fail margin tolerance")
    sv.add_argument("--reflected", action="store_true",
                    help="starshape negative control on the x-reflected domain")

    se = subs.add_parser("eigen", help="solve the discrete eigenproblem")
    _add_common(se)
    se.add_argument("--nx", type=int, default=64)
    se.add_argument("--ny", type=int, default=64)
    se.add_argument("--count", type=int, default=4)

    sb = subs.add_parser("bound", help="end-to-end identity and bound check")
    _add_common(sb)
    sb.add_argument("--nx", type=int, default=64)
    sb.add_argument("--ny", type=int, default=64)
    sb.add_argument("--count", type=int, default=4)
    sb.add_argument("--tol", type=float, default=None,
                    help="relative tolerance for bound satisfaction (default 1e-2)")

    sp = subs.add_parser("plot", help="static SVG plots")
    sp.add_argument("target", choices=("h", "domain", "eigen"))
    _add_common(sp, fmt_choices=("svg",))
    sp.add_argument("--nx", type=int, default=48)
    sp.add_argument("--ny", type=int, default=48)

    return parser


def _merge_range_values(argv):
    """Join `--x0-range -a:-b:n` into one token so argparse does not read
    the leading-dash value as an option."""
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--x0-range":
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"--x0-range={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(_merge_range_values(
        sys.argv[1:] if argv is None else list(argv)))
    handler = {
        "constants": _cmd_constants,
        "verify": _cmd_verify,
        "eigen": _cmd_eigen,
        "bound": _cmd_bound,
        "plot": _cmd_plot,
    }[args.command]
    return handler(args, parser)


def main() -> int:
    return run()


if __name__ == "__main__":
    sys.exit(main())
