"""Boundary integrands of the dilation identity and the eigenfunction bound.

The identity equates 4*lambda*||u||^2 with line integrals of two integrands
omega1, omega2 over BC and sigma.  Both the general normal-based forms and
the curve-specific simplified forms are provided, together with arc-length
quadrature, the discrete residual of the identity, and the optimized-epsilon
bound check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import G1, G2, ConstantLedger, ledger, optimize_epsilons
from .geometry import BoundaryCurve, TricomiDomain
from .report import VerificationReport

__all__ = [
    "BoundaryTrace",
    "BoundaryNormBundle",
    "omega1",
    "omega2",
    "omega1_BC_simplified",
    "omega2_BC_simplified",
    "omega1_sigma_simplified",
    "bc_trace",
    "sigma_trace",
    "line_integral",
    "norm_bundle_from_traces",
    "area_l2_norm_sq",
    "pohozaev_residual",
    "bound_check",
    "random_trace",
    "bc_omega1_estimate",
    "bc_omega2_estimate",
    "sigma_omega1_estimate",
    "verify_integrand_equivalence",
    "verify_trace_inequalities",
]

_UNIT_NORMAL_TOL = 1e-10


@dataclass
class BoundaryTrace:
    """Samples of (u, u_x, u_y) at quadrature nodes of one boundary curve.

    weights are quadrature weights in the parameter measure, so that
    integral of f ds ~= sum(f * arc_element(params) * weights).
    """

    curve: BoundaryCurve
    params: np.ndarray
    weights: np.ndarray
    u: np.ndarray
    ux: np.ndarray
    uy: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.params, dtype=float)
        a, b = self.curve.param_range
        if np.any(np.diff(t) <= 0):
            raise ValueError("trace nodes must be strictly increasing")
        if t[0] < a - 1e-12 or t[-1] > b + 1e-12:
            raise ValueError("trace nodes outside the curve's parameter range")
        for name in ("u", "ux", "uy"):
            v = np.asarray(getattr(self, name), dtype=float)
            if not np.all(np.isfinite(v)):
                raise ValueError(f"non-finite values in trace field {name}")

    @property
    def positions(self):
        return self.curve.position(self.params)


@dataclass(frozen=True)
class BoundaryNormBundle:
    """The boundary L2 norms entering the eigenfunction bound.

    w_ux denotes the weighted norm |||y|^(1/2) u_x||.
    """

    u_L2_BC: float
    re_u_L2_BC: float
    im_u_L2_BC: float
    w_ux_L2_BC: float
    uy_L2_BC: float
    w_ux_L2_sigma: float
    uy_L2_sigma: float

    def __post_init__(self):
        for name, v in self.__dict__.items():
            if v < 0 or not math.isfinite(v):
                raise ValueError(f"norm {name} must be finite and nonnegative")


# -- pointwise integrands ---------------------------------------------------

def _check_unit(normal):
    nx, ny = np.asarray(normal[0], dtype=float), np.asarray(normal[1], dtype=float)
    if np.any(np.abs(np.hypot(nx, ny) - 1.0) > _UNIT_NORMAL_TOL):
        raise ValueError("normal must be a unit vector")
    return nx, ny


def omega1(point, grad, normal):
    """General first integrand <2 Du (-y u_x, -u_y) + (y u_x^2 + u_y^2)(-3x, -2y), n>."""
    nx, ny = _check_unit(normal)
    x, y = np.asarray(point[0], dtype=float), np.asarray(point[1], dtype=float)
    ux, uy = np.asarray(grad[0], dtype=float), np.asarray(grad[1], dtype=float)
    du = -3.0 * x * ux - 2.0 * y * uy
    qx = 2.0 * du * (-y * ux) + (y * ux**2 + uy**2) * (-3.0 * x)
    qy = 2.0 * du * (-uy) + (y * ux**2 + uy**2) * (-2.0 * y)
    return qx * nx + qy * ny


def omega2(point, value, grad, normal, F_of_u):
    """General second integrand <-2 F(u) (-3x, -2y) - u (-y u_x, -u_y), n>."""
    nx, ny = _check_unit(normal)
    x, y = np.asarray(point[0], dtype=float), np.asarray(point[1], dtype=float)
    u = np.asarray(value, dtype=float)
    ux, uy = np.asarray(grad[0], dtype=float), np.asarray(grad[1], dtype=float)
    F = np.asarray(F_of_u, dtype=float)
    qx = -2.0 * F * (-3.0 * x) - u * (-y * ux)
    qy = -2.0 * F * (-2.0 * y) - u * (-uy)
    return qx * nx + qy * ny


def omega1_BC_simplified(y, ux, uy):
    """On BC: 4(-y)^(3/2)(1-y)^(-1/2)[(-y)^(1/2) u_x + u_y]^2, a perfect square."""
    y = np.asarray(y, dtype=float)
    if np.any(y > 1e-12):
        raise ValueError("BC form needs y <= 0")
    my = np.abs(np.minimum(y, 0.0))
    return 4.0 * my**1.5 / np.sqrt(1.0 - y) * (np.sqrt(my) * ux + uy) ** 2


def omega2_BC_simplified(y, u, ux, uy):
    """On BC: -(-y)^(1/2)(1-y)^(-1/2) u [(-y)^(1/2) u_x + u_y]."""
    y = np.asarray(y, dtype=float)
    if np.any(y > 1e-12):
        raise ValueError("BC form needs y <= 0")
    my = np.abs(np.minimum(y, 0.0))
    return -np.sqrt(my) / np.sqrt(1.0 - y) * u * (np.sqrt(my) * ux + uy)


def omega1_sigma_simplified(x, ux, uy, dom: TricomiDomain):
    """On sigma with zero trace: G1 y u_x^2 + G2 y^(1/2) u_x u_y - G1 u_y^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(dom.g(x))
    G1v = np.asarray(G1(dom, x))
    G2v = np.asarray(G2(dom, x))
    return G1v * y * ux**2 + G2v * np.sqrt(y) * ux * uy - G1v * uy**2


# -- quadrature -------------------------------------------------------------

def bc_trace(dom: TricomiDomain, n: int, u=None, ux=None, uy=None) -> BoundaryTrace:
    """Trapezoid nodes uniform in y over [y_C, 0]."""
    curve = dom.boundary_curve("BC")
    y = np.linspace(dom.y_C, 0.0, n)
    w = np.full(n, (0.0 - dom.y_C) / (n - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    z = np.zeros(n)
    return BoundaryTrace(curve, y, w,
                         z if u is None else np.asarray(u, dtype=float),
                         z if ux is None else np.asarray(ux, dtype=float),
                         z if uy is None else np.asarray(uy, dtype=float))


def _graded(s):
    # Quintic grading: endpoint distance ~ s^3, absorbing ds ~ dist^(-2/3).
    return s**3 * (10.0 - 15.0 * s + 6.0 * s * s)


def sigma_trace(dom: TricomiDomain, n: int, u=None, ux=None, uy=None) -> BoundaryTrace:
    """Midpoint nodes graded toward both endpoints of sigma.

    The arc element (3/2) h / g^2 is singular like distance^(-2/3) at the
    endpoints; cubic grading of the node map restores algebraic convergence.
    """
    curve = dom.boundary_curve("Sigma")
    s = (np.arange(n) + 0.5) / n
    t = -2.0 * dom.x0 * _graded(s)          # parameter t = -x in (0, -2x0)
    dt_ds = -2.0 * dom.x0 * 30.0 * s**2 * (1.0 - s) ** 2
    w = dt_ds / n
    z = np.zeros(n)
    return BoundaryTrace(curve, t, w,
                         z if u is None else np.asarray(u, dtype=float),
                         z if ux is None else np.asarray(ux, dtype=float),
                         z if uy is None else np.asarray(uy, dtype=float))


def line_integral(trace: BoundaryTrace, integrand) -> float:
    """Composite quadrature of integrand * arc_element over the trace nodes.

    integrand(x, y, u, ux, uy) -> array of pointwise values.
    """
    if len(trace.params) < 3:
        raise ValueError("need at least 3 quadrature nodes")
    x, y = trace.positions
    vals = np.asarray(integrand(x, y, trace.u, trace.ux, trace.uy), dtype=float)
    return float(np.sum(vals * trace.curve.arc_element(trace.params) * trace.weights))


def norm_bundle_from_traces(bc: BoundaryTrace, sigma: BoundaryTrace | None = None,
                            im_bc: BoundaryTrace | None = None) -> BoundaryNormBundle:
    """Discrete boundary norms with the same quadrature as line_integral."""

    def norm(trace, f):
        return math.sqrt(max(line_integral(trace, f), 0.0))

    sq_u = lambda x, y, u, ux, uy: u**2
    sq_wux = lambda x, y, u, ux, uy: np.abs(y) * ux**2
    sq_uy = lambda x, y, u, ux, uy: uy**2

    re_u = norm(bc, sq_u)
    im_u = norm(im_bc, sq_u) if im_bc is not None else 0.0
    return BoundaryNormBundle(
        u_L2_BC=math.hypot(re_u, im_u),
        re_u_L2_BC=re_u,
        im_u_L2_BC=im_u,
        w_ux_L2_BC=norm(bc, sq_wux),
        uy_L2_BC=norm(bc, sq_uy),
        w_ux_L2_sigma=norm(sigma, sq_wux) if sigma is not None else 0.0,
        uy_L2_sigma=norm(sigma, sq_uy) if sigma is not None else 0.0,
    )


def area_l2_norm_sq(dom: TricomiDomain, xs: np.ndarray, ys: np.ndarray,
                    U: np.ndarray, subsamples: int = 4) -> float:
    """||U||^2 over Omega by midpoint rule with sub-sampled cut-cell fractions.

    U is nodal on the tensor grid xs x ys (shape (len(xs), len(ys))); cell
    values are corner averages, cut cells are weighted by the fraction of a
    subsamples x subsamples stencil lying inside the domain.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    U = np.asarray(U, dtype=float)
    dx = np.diff(xs)
    dy = np.diff(ys)
    cell_val = 0.25 * (U[:-1, :-1] + U[1:, :-1] + U[:-1, 1:] + U[1:, 1:])

    # Fraction of each cell inside Omega, sampled on a sub-grid of midpoints.
    off = (np.arange(subsamples) + 0.5) / subsamples
    frac = np.zeros((len(xs) - 1, len(ys) - 1))
    for ox in off:
        sub_x = xs[:-1] + ox * dx
        for oy in off:
            sub_y = ys[:-1] + oy * dy
            frac += dom.contains_grid(sub_x[:, None], sub_y[None, :])
    frac /= subsamples * subsamples
    area = dx[:, None] * dy[None, :]
    return float(np.sum(cell_val**2 * frac * area))


# -- identity and bound checks ---------------------------------------------

def pohozaev_residual(eigenpair, dom: TricomiDomain) -> dict:
    """Discrete residual of 4 lambda ||u||^2 = int_BC(w1+w2) ds + int_sigma w1 ds.

    eigenpair must expose lam, l2_norm_sq and traces {'BC': ..., 'Sigma': ...}.
    """
    lam = eigenpair.lam
    if lam <= 0.0:
        raise ValueError("identity check needs a positive eigenvalue")
    norm_sq = eigenpair.l2_norm_sq
    bc = eigenpair.traces["BC"]
    sg = eigenpair.traces["Sigma"]

    lhs = 4.0 * lam * norm_sq
    w1 = lambda x, y, u, ux, uy: omega1_BC_simplified(y, ux, uy)
    w2 = lambda x, y, u, ux, uy: omega2_BC_simplified(y, u, ux, uy)
    ws = lambda x, y, u, ux, uy: omega1_sigma_simplified(x, ux, uy, dom)
    rhs_bc = line_integral(bc, w1) + line_integral(bc, w2)
    rhs_sigma = line_integral(sg, ws)
    rhs = rhs_bc + rhs_sigma
    rel = 0.0 if lhs == 0.0 and rhs == 0.0 else abs(lhs - rhs) / max(abs(lhs), 1e-300)
    return {
        "lhs": lhs,
        "rhs_BC": rhs_bc,
        "rhs_sigma": rhs_sigma,
        "relative_residual": rel,
    }


def bound_check(eigenpair, norms: BoundaryNormBundle, led: ConstantLedger,
                rel_tol: float = 1e-2) -> dict:
    """Check 2 sqrt(lambda) ||u|| against the optimized right-hand side."""
    lam = eigenpair.lam
    lhs = 2.0 * math.sqrt(lam) * math.sqrt(max(eigenpair.l2_norm_sq, 0.0))
    eps1, eps2, rhs = optimize_epsilons(norms, led)
    return {
        "lhs": lhs,
        "rhs": rhs,
        "eps1": eps1,
        "eps2": eps2,
        "satisfied": lhs <= rhs * (1.0 + rel_tol),
    }


# -- randomized property checks ---------------------------------------------

def random_trace(dom: TricomiDomain, kind: str, rng, n: int = 64,
                 zero_u: bool = False, amplitude: float = 1.0) -> BoundaryTrace:
    """A trace with bounded random (u, u_x, u_y); the values need not be
    consistent restrictions of a single function."""
    u, ux, uy = rng.uniform(-amplitude, amplitude, (3, n))
    if zero_u:
        u = np.zeros(n)
    if kind == "BC":
        return bc_trace(dom, n, u=u, ux=ux, uy=uy)
    if kind == "Sigma":
        return sigma_trace(dom, n, u=u, ux=ux, uy=uy)
    raise ValueError(f"no quadrature trace for curve kind {kind!r}")


def bc_omega1_estimate(dom: TricomiDomain, trace: BoundaryTrace,
                       led: ConstantLedger, eps: float) -> dict:
    """int_BC omega1 ds versus C1(eps) a1 + C2(eps) a2 in the same quadrature."""
    integral = line_integral(
        trace, lambda x, y, u, ux, uy: omega1_BC_simplified(y, ux, uy))
    b = norm_bundle_from_traces(trace)
    bound = led.C1(eps) * b.w_ux_L2_BC**2 + led.C2(eps) * b.uy_L2_BC**2
    return {"integral": integral, "bound": bound, "margin": bound - integral}


def bc_omega2_estimate(dom: TricomiDomain, trace: BoundaryTrace,
                       led: ConstantLedger) -> dict:
    """int_BC omega2 ds versus C3 ||u|| (||w u_x|| + ||u_y||)."""
    integral = line_integral(
        trace, lambda x, y, u, ux, uy: omega2_BC_simplified(y, u, ux, uy))
    b = norm_bundle_from_traces(trace)
    bound = led.C3 * b.u_L2_BC * (b.w_ux_L2_BC + b.uy_L2_BC)
    return {"integral": integral, "bound": bound, "margin": bound - integral}


def sigma_omega1_estimate(dom: TricomiDomain, trace: BoundaryTrace,
                          led: ConstantLedger, eps: float) -> dict:
    """int_sigma omega1 ds (zero trace) versus C14(eps) b1 + C15(eps) b2."""
    integral = line_integral(
        trace, lambda x, y, u, ux, uy: omega1_sigma_simplified(x, ux, uy, dom))
    b = norm_bundle_from_traces(bc_trace(dom, 8), sigma=trace)
    bound = led.C14(eps) * b.w_ux_L2_sigma**2 + led.C15(eps) * b.uy_L2_sigma**2
    return {"integral": integral, "bound": bound, "margin": bound - integral}


def verify_trace_inequalities(x0: float, n_traces: int = 1000,
                              eps_values=(0.5, 1.0, 2.0), seed: int = 0,
                              n_nodes: int = 64) -> VerificationReport:
    """The three quadrature estimates over random trace bundles.

    For every random trace and every epsilon, all three margins must be
    >= -1e-10 (they are exact pointwise/Cauchy-Schwarz consequences when
    both sides share the quadrature weights).
    """
    dom = TricomiDomain(x0)
    led = ledger(x0)
    rng = np.random.default_rng(seed)
    tol = 1e-10
    worst, worst_loc, worst_note = math.inf, x0, ""
    for k in range(n_traces):
        bc = random_trace(dom, "BC", rng, n=n_nodes)
        sg = random_trace(dom, "Sigma", rng, n=n_nodes, zero_u=True)
        checks = [("bc_omega2", bc_omega2_estimate(dom, bc, led)["margin"])]
        for eps in eps_values:
            checks.append((f"bc_omega1_eps{eps:g}",
                           bc_omega1_estimate(dom, bc, led, eps)["margin"]))
            checks.append((f"sigma_omega1_eps{eps:g}",
                           sigma_omega1_estimate(dom, sg, led, eps)["margin"]))
        for name, margin in checks:
            if margin < worst:
                worst, worst_note = margin, f"{name} at draw {k}"
    return VerificationReport(
        claim_id="trace_inequalities",
        x0=x0,
        grid_size=n_traces * n_nodes,
        worst_margin=worst,
        worst_location=worst_loc,
        passed=worst >= -tol,
        notes=f"tolerance={tol:g}; worst: {worst_note}",
    )


def verify_integrand_equivalence(x0: float, n_states: int = 1000,
                                 seed: int = 0) -> VerificationReport:
    """General normal-based integrands versus the curve-specific forms.

    Checks, over random states per curve: omega1 on BC against its perfect
    square form (and its nonnegativity); omega2 on BC against its form with
    an arbitrary F value (the dilation field is tangent to BC, so F drops
    out); omega1 on sigma with zero trace against the G1/G2 form.  The
    agreement tolerance is 1e-12 relative to the state's magnitude.
    """
    dom = TricomiDomain(x0)
    rng = np.random.default_rng(seed)
    tol = 1e-12
    worst, worst_loc, worst_note = math.inf, x0, ""

    bc = dom.boundary_curve("BC")
    sg = dom.boundary_curve("Sigma")
    margin = math.inf

    def track(name, diff, scale, loc):
        nonlocal worst, worst_loc, worst_note
        m = tol - diff / scale
        if m < worst:
            worst, worst_loc, worst_note = m, float(loc), name

    # BC states: interior parameters, random value/gradient/F.
    a, b = bc.param_range
    t = a + (b - a) * rng.uniform(0.05, 0.95, n_states)
    u, ux, uy, F = rng.uniform(-1.0, 1.0, (4, n_states))
    x, y = bc.position(t)
    n_vec = bc.normal(t)
    w1_gen = omega1((x, y), (ux, uy), n_vec)
    w1_simp = omega1_BC_simplified(y, ux, uy)
    scale = np.maximum(1.0, np.abs(w1_simp))
    i = int(np.argmax(np.abs(w1_gen - w1_simp) / scale))
    track("omega1_BC", abs(w1_gen[i] - w1_simp[i]), scale[i], x[i])
    i = int(np.argmin(w1_simp))
    track("omega1_BC_nonneg", max(-float(w1_simp[i]), 0.0), 1.0, x[i])
    w2_gen = omega2((x, y), u, (ux, uy), n_vec, F)
    w2_simp = omega2_BC_simplified(y, u, ux, uy)
    scale = np.maximum(1.0, np.abs(w2_simp))
    i = int(np.argmax(np.abs(w2_gen - w2_simp) / scale))
    track("omega2_BC", abs(w2_gen[i] - w2_simp[i]), scale[i], x[i])

    # Sigma states: zero trace, random gradient.
    a, b = sg.param_range
    t = a + (b - a) * rng.uniform(0.05, 0.95, n_states)
    ux, uy = rng.uniform(-1.0, 1.0, (2, n_states))
    x, y = sg.position(t)
    n_vec = sg.normal(t)
    w1_gen = omega1((x, y), (ux, uy), n_vec)
    w1_simp = omega1_sigma_simplified(x, ux, uy, dom)
    scale = np.maximum(1.0, np.abs(w1_simp))
    i = int(np.argmax(np.abs(w1_gen - w1_simp) / scale))
    track("omega1_sigma", abs(w1_gen[i] - w1_simp[i]), scale[i], x[i])

    return VerificationReport(
        claim_id="integrand_equivalence",
        x0=x0,
        grid_size=2 * n_states,
        worst_margin=worst,
        worst_location=worst_loc,
        passed=worst >= 0.0,
        notes=f"tolerance={tol:g}; worst: {worst_note}",
    )
