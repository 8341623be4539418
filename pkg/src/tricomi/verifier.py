"""Dense-grid verification of the shape of h and the bounds on G1, G2.

Checks are floating-point sweeps with margin tolerances, not certified
interval arithmetic.  The proof-internal functions H, N, N1, R, S1, S2 are
exposed so tests can cross-check derivatives and monotonicity claims by an
independent route (divided differences vs. printed closed forms).
"""

from __future__ import annotations

import math

import numpy as np

from .constants import G1, G2, X0_CRITICAL, ledger
from .geometry import TricomiDomain
from .report import VerificationReport

__all__ = [
    "sweep_grid",
    "verify_h_profile",
    "verify_G1_bounds",
    "verify_G2_bounds",
    "find_inflection",
    "proof_internals",
    "N_of_X",
    "N_of_X_alt",
]

# Grid margins are compared against 1e-10 relative to the sweep's scale.
_MARGIN_RTOL = 1e-10
# Dead band for second-divided-difference classification, scaled by x0^2.
_CURVATURE_TOL = 1e-8
# Sharpness of a bound is declared when the grid gap closes to this level.
_SHARP_TOL = 1e-6


def sweep_grid(x0: float, n: int) -> np.ndarray:
    """Uniform n-point grid on [2x0, 0] plus the critical breakpoints."""
    led = ledger(x0)
    extra = [2.0 * x0, x0, 1.5 * x0, 0.5 * x0, led.x1, led.x2, 0.0]
    if led.x_plus is not None:
        extra += [led.x_plus, led.x_minus]
    xs = np.union1d(np.linspace(2.0 * x0, 0.0, n), np.asarray(extra))
    return np.clip(xs, 2.0 * x0, 0.0)


def _G_of_X(x0: float, X):
    prod = 9.0 * (x0 * x0 - np.asarray(X, dtype=float) ** 2) / 4.0
    return np.cbrt(np.clip(prod, 0.0, None))


def N_of_X(x0: float, X):
    """Curvature numerator of H, expanded form."""
    X = np.asarray(X, dtype=float)
    G = _G_of_X(x0, X)
    return (18.0 * X**4 - 8.0 * X**2 * G**4 + 12.0 * X**2 * G**3
            + 4.0 * G**6 - (16.0 / 3.0) * G**7)


def N_of_X_alt(x0: float, X):
    """Curvature numerator of H, factored form (independent cross-check)."""
    X = np.asarray(X, dtype=float)
    G = _G_of_X(x0, X)
    return (9.0 / 4.0) * (5.0 * X**4 - 6.0 * x0**2 * X**2 + 9.0 * x0**4
                          - 4.0 * (X**4 - 4.0 * x0**2 * X**2 + 3.0 * x0**4) * G)


def find_inflection(x0: float) -> float:
    """Inflection abscissa of h in (x0, x_plus), for x0 < -sqrt(3)/4.

    Solves N(X) = 0 by bisection to 1e-12; N is negative at X = 0 and
    positive at X_plus, and increasing in between.
    """
    if x0 >= X0_CRITICAL:
        raise ValueError("inflection point exists only for x0 < -sqrt(3)/4")
    X_plus = math.sqrt(x0 * x0 - 3.0 / 16.0)
    n_lo = float(N_of_X_alt(x0, 0.0))
    n_hi = float(N_of_X_alt(x0, X_plus))
    if not (n_lo < 0.0 < n_hi):
        raise RuntimeError(
            f"sign condition N(0) < 0 < N(X_plus) failed: {n_lo:g}, {n_hi:g}")
    lo, hi = 0.0, X_plus
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if float(N_of_X_alt(x0, mid)) < 0.0:
            lo = mid
        else:
            hi = mid
    return x0 + 0.5 * (lo + hi)


def _second_differences(f, xs: np.ndarray, delta: float):
    """Central second divided differences at the points of xs."""
    return (f(xs - delta) - 2.0 * f(xs) + f(xs + delta)) / delta**2


def _finish(claim_id, x0, grid, checks, notes_extra=""):
    """Fold named (margin, tol, location) triples into one report."""
    worst_name, worst = None, math.inf
    worst_loc = x0
    passed = True
    parts = []
    for name, (margin, tol, loc) in checks.items():
        if margin < -tol:
            passed = False
        ratio = margin / tol if tol > 0 else margin
        if ratio < worst:
            worst, worst_name, worst_loc = ratio, name, loc
        parts.append(f"{name}={margin:.3e}(tol={tol:.1e})")
    raw_margin = checks[worst_name][0]
    notes = "; ".join(parts)
    if notes_extra:
        notes += "; " + notes_extra
    return VerificationReport(
        claim_id=claim_id,
        x0=x0,
        grid_size=len(grid),
        worst_margin=float(raw_margin),
        worst_location=float(worst_loc),
        passed=passed,
        notes=f"worst={worst_name}; {notes}",
    )


def verify_h_profile(x0: float, grid_size: int) -> VerificationReport:
    """Bounds, evenness and convexity pattern of the normal-modulus h."""
    if grid_size < 1000:
        raise ValueError("grid_size must be at least 1000")
    dom = TricomiDomain(x0)
    led = ledger(x0)
    xs = sweep_grid(x0, grid_size)
    hx = np.asarray(dom.h(xs))
    scale = float(np.max(hx))
    tol = _MARGIN_RTOL * max(1.0, scale)

    checks = {}
    if x0 >= X0_CRITICAL:
        lower = (1.5 * x0**4) ** (1.0 / 3.0)
        upper = abs(x0)
    else:
        lower = math.sqrt(x0 * x0 - 3.0 / 64.0)
        upper = led.C4
    bound_margin = np.minimum(hx - lower, upper - hx)
    i = int(np.argmin(bound_margin))
    checks["bounds"] = (float(bound_margin[i]), tol, float(xs[i]))

    even = -float(np.max(np.abs(hx - np.asarray(dom.h(2.0 * x0 - xs)))))
    checks["evenness"] = (even, 1e-12 * max(1.0, scale), x0)

    delta = abs(2.0 * x0) / grid_size
    interior = xs[(xs > 2.0 * x0 + 2.0 * delta) & (xs < -2.0 * delta)]
    d2 = _second_differences(dom.h, interior, delta)
    curv_tol = _CURVATURE_TOL * x0 * x0
    if x0 >= X0_CRITICAL:
        j = int(np.argmin(d2))
        checks["convexity"] = (float(d2[j]), curv_tol, float(interior[j]))
    else:
        xbar = find_inflection(x0)
        xbar_m = 2.0 * x0 - xbar  # mirror inflection
        guard = 2.0 * delta
        convex = (interior <= xbar_m - guard) | (interior >= xbar + guard)
        concave = (interior >= xbar_m + guard) & (interior <= xbar - guard)
        if np.any(convex):
            sub, vals = interior[convex], d2[convex]
            j = int(np.argmin(vals))
            checks["convex_outer"] = (float(vals[j]), curv_tol, float(sub[j]))
        if np.any(concave):
            sub, vals = interior[concave], -d2[concave]
            j = int(np.argmin(vals))
            checks["concave_inner"] = (float(vals[j]), curv_tol, float(sub[j]))
        checks["inflection_in_range"] = (
            min(xbar - x0, (led.x_plus - xbar) if led.x_plus else 0.0), 1e-12, xbar)

    return _finish("h_profile", x0, xs, checks)


def verify_G1_bounds(x0: float, grid_size: int) -> VerificationReport:
    """Regime-correct two-sided bound on G1 = g1/h over [2x0, 0]."""
    if grid_size < 1000:
        raise ValueError("grid_size must be at least 1000")
    dom = TricomiDomain(x0)
    led = ledger(x0)
    xs = sweep_grid(x0, grid_size)
    vals = np.asarray(G1(dom, xs))
    tol = _MARGIN_RTOL * max(1.0, float(np.max(np.abs(vals))))
    lower = led.C5 if x0 >= X0_CRITICAL else led.C7
    upper = led.C6 if x0 >= X0_CRITICAL else led.C8

    lo_gap = vals - lower
    hi_gap = upper - vals
    margin = np.minimum(lo_gap, hi_gap)
    i = int(np.argmin(margin))
    checks = {"bounds": (float(margin[i]), tol, float(xs[i]))}
    extra = (f"lower_gap={float(np.min(lo_gap)):.3e}; "
             f"upper_gap={float(np.min(hi_gap)):.3e}; "
             f"sharp_lower={float(np.min(lo_gap)) <= _SHARP_TOL}; "
             f"sharp_upper={float(np.min(hi_gap)) <= _SHARP_TOL}")
    return _finish("G1_bounds", x0, xs, checks, extra)


def verify_G2_bounds(x0: float, grid_size: int) -> VerificationReport:
    """Two-sided bound on G2 = g2/h plus the symmetric bound |G2| <= C13."""
    if grid_size < 1000:
        raise ValueError("grid_size must be at least 1000")
    dom = TricomiDomain(x0)
    led = ledger(x0)
    xs = sweep_grid(x0, grid_size)
    vals = np.asarray(G2(dom, xs))
    tol = _MARGIN_RTOL * max(1.0, float(np.max(np.abs(vals))))
    lower = led.C9 if x0 >= X0_CRITICAL else led.C11
    upper = led.C10 if x0 >= X0_CRITICAL else led.C12

    lo_gap = vals - lower
    hi_gap = upper - vals
    margin = np.minimum(lo_gap, hi_gap)
    i = int(np.argmin(margin))
    abs_margin = led.C13 - np.abs(vals)
    j = int(np.argmin(abs_margin))
    checks = {
        "bounds": (float(margin[i]), tol, float(xs[i])),
        "abs_bound": (float(abs_margin[j]), tol, float(xs[j])),
    }
    extra = (f"lower_gap={float(np.min(lo_gap)):.3e}; "
             f"upper_gap={float(np.min(hi_gap)):.3e}; "
             f"sharp_lower={float(np.min(lo_gap)) <= _SHARP_TOL}; "
             f"sharp_upper={float(np.min(hi_gap)) <= _SHARP_TOL}")
    return _finish("G2_bounds", x0, xs, checks, extra)


def proof_internals(x0: float, X=None, x=None) -> dict:
    """Evaluate the proof-internal functions at one abscissa.

    Accepts either the shifted coordinate X = x - x0 in [0, -x0] or the
    plain abscissa x.  H, H', N, N1, R live on the shifted coordinate;
    S1, S2 (derivative numerators of G1, G2) live on x in [2x0, 0], with
    G1'(x) proportional to S1(x) and G2'(x) proportional to -S2(x).
    """
    if (X is None) == (x is None):
        raise ValueError("give exactly one of X or x")
    if X is None:
        X = x - x0
    else:
        x = x0 + X
    dom = TricomiDomain(x0)
    out = {"X": float(X), "x": float(x)}
    if 0.0 <= X <= -x0 + 1e-12:
        G = float(_G_of_X(x0, X))
        H = math.hypot(X, (2.0 / 3.0) * G * G)
        out["H"] = H
        out["G"] = G
        out["H_prime"] = (3.0 - 4.0 * G) * X / (3.0 * H)
        out["N"] = float(N_of_X(x0, X))
        out["N_alt"] = float(N_of_X_alt(x0, X))
        out["N1"] = float(2.0 * (5.0 * X**2 - 3.0 * x0**2) * G**2
                          + 21.0 * X**4 - 66.0 * x0**2 * X**2 + 45.0 * x0**4)
        denom = 4.0 * (11.0 * x0**2 - 7.0 * X**2)
        if denom != 0.0:
            out["R"] = (21.0 * x0**2 - 25.0 * X**2) / denom
    if 2.0 * x0 - 1e-12 <= x <= 1e-12:
        gx = float(dom.g(x))
        out["S1"] = (3.0 * (2.0 * x**3 - 6.0 * x0 * x**2 + 7.0 * x0**2 * x - 3.0 * x0**3)
                     - x * (4.0 * x**2 - 13.0 * x0 * x + 6.0 * x0**2) * gx)
        out["S2"] = (3.0 * (2.0 * x**4 - 8.0 * x0 * x**3 + 12.0 * x0**2 * x**2
                            - 7.0 * x0**3 * x + x0**4)
                     - x * (4.0 * x**3 - 17.0 * x0 * x**2 + 17.0 * x0**2 * x
                            + 2.0 * x0**3) * gx)
    return out
