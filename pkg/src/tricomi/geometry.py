"""Closed-form geometry of the normal Tricomi domain.

The domain is bounded by the two characteristics AC, BC of T = -y d_xx - d_yy
in the half-plane y <= 0 and by the normal elliptic arc sigma
(9(x - x0)^2 + 4y^3 = 9 x0^2) in y > 0, for a parameter x0 < 0.
Everything here is exact closed-form evaluation; no numerical integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .report import VerificationReport

__all__ = [
    "TricomiDomain",
    "BoundaryCurve",
    "flow",
    "verify_star_shaped",
    "MEMBERSHIP_TOL",
]

# Absolute tolerance on each membership inequality; boundary points count
# as inside (flow trajectories ride exactly along BC).
MEMBERSHIP_TOL = 1e-12

# Inputs closer than this to a parametrization endpoint make g' meaningless.
_ENDPOINT_GUARD = 1e-12


def _real_cbrt(v):
    """Real cube root of a nonnegative quantity, clamping tiny negative residue."""
    v = np.asarray(v, dtype=float)
    if np.any(v < -1e-15):
        raise ValueError("cube-root argument is negative beyond rounding residue")
    out = np.cbrt(np.clip(v, 0.0, None))
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class TricomiDomain:
    """The normal Tricomi domain for a given abscissa parameter x0 < 0."""

    x0: float
    y_C: float = field(init=False)

    def __post_init__(self):
        if not (self.x0 < 0.0) or not math.isfinite(self.x0):
            raise ValueError(f"x0 must be a finite negative real, got {self.x0!r}")
        object.__setattr__(self, "y_C", -((3.0 * abs(self.x0) / 2.0) ** (2.0 / 3.0)))

    @property
    def A(self):
        return (2.0 * self.x0, 0.0)

    @property
    def B(self):
        return (0.0, 0.0)

    @property
    def C(self):
        return (self.x0, self.y_C)

    @property
    def apex(self):
        """Highest point of sigma, (x0, g(x0))."""
        return (self.x0, self.g(self.x0))

    # -- closed-form boundary functions -------------------------------------

    def _check_range(self, x, name="x"):
        x = np.asarray(x, dtype=float)
        lo, hi = 2.0 * self.x0, 0.0
        if np.any(x < lo - _ENDPOINT_GUARD) or np.any(x > hi + _ENDPOINT_GUARD):
            raise ValueError(f"{name} outside [2*x0, 0] = [{lo}, {hi}]")
        return np.clip(x, lo, hi)

    def g(self, x):
        """Height of the normal curve, [9x(2x0 - x)/4]^(1/3) on [2x0, 0]."""
        x = self._check_range(x)
        return _real_cbrt(9.0 * x * (2.0 * self.x0 - x) / 4.0)

    def g_prime(self, x):
        """dg/dx = -(3/2)(x - x0)/g(x)^2 on the open interval (2x0, 0)."""
        x = np.asarray(x, dtype=float)
        if np.any(x <= 2.0 * self.x0 + _ENDPOINT_GUARD) or np.any(x >= -_ENDPOINT_GUARD):
            raise ValueError("g' is singular at the endpoints of [2*x0, 0]")
        gx = self.g(x)
        out = -1.5 * (x - self.x0) / gx**2
        return float(out) if out.ndim == 0 else out

    def h(self, x):
        """Modulus of the non-normalized normal on sigma:
        {(x - x0)^2 + (4/9) g(x)^4}^(1/2), positive on all of [2x0, 0]."""
        x = self._check_range(x)
        gx = np.asarray(self.g(x))
        out = np.hypot(x - self.x0, (2.0 / 3.0) * gx**2)
        return float(out) if out.ndim == 0 else out

    # -- membership ---------------------------------------------------------

    def membership_slack(self, p):
        """Signed slack of the defining inequalities at p (>= 0 means inside).

        For y >= 0 the binding constraint is the normal-curve inequality
        9(x - x0)^2 + 4y^3 <= 9 x0^2; for y_C <= y < 0 the point must lie
        between the two characteristics.  The value is the worst constraint
        margin, in the natural units of each inequality.
        """
        x, y = float(p[0]), float(p[1])
        if y >= 0.0:
            return 9.0 * self.x0**2 - (9.0 * (x - self.x0) ** 2 + 4.0 * y**3)
        c = (2.0 / 3.0) * (-y) ** 1.5
        return min(x - (2.0 * self.x0 + c), -c - x, y - self.y_C)

    def contains(self, p):
        """True iff p lies in the closed domain, with tolerance MEMBERSHIP_TOL."""
        return self.membership_slack(p) >= -MEMBERSHIP_TOL

    def membership_slack_grid(self, X, Y):
        """Vectorized membership_slack over coordinate arrays."""
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        upper = 9.0 * self.x0**2 - (9.0 * (X - self.x0) ** 2 + 4.0 * Y**3)
        c = (2.0 / 3.0) * np.abs(np.minimum(Y, 0.0)) ** 1.5
        lower = np.minimum(X - (2.0 * self.x0 + c),
                           np.minimum(-c - X, Y - self.y_C))
        return np.where(Y >= 0.0, upper, lower)

    def contains_grid(self, X, Y):
        """Vectorized contains over coordinate arrays."""
        return self.membership_slack_grid(X, Y) >= -MEMBERSHIP_TOL

    def boundary_curve(self, kind: str) -> "BoundaryCurve":
        """Boundary piece 'AC', 'BC' or 'Sigma', counterclockwise oriented."""
        if kind == "AC":
            return _make_ac(self)
        if kind == "BC":
            return _make_bc(self)
        if kind == "Sigma":
            return _make_sigma(self)
        raise ValueError(f"unknown boundary kind {kind!r}")

    def starlike_product(self, kind: str, t):
        """<(-3x, -2y), outer normal> at the boundary point of parameter t.

        Closed forms: 6 x0 (1-y)^(-1/2) on AC, identically 0 on BC,
        -3 x x0 / h(x) on sigma; all <= 0.
        """
        curve = self.boundary_curve(kind)
        x, y = curve.position(t)
        nx, ny = curve.normal(t)
        return -3.0 * x * nx - 2.0 * y * ny


@dataclass(frozen=True)
class BoundaryCurve:
    """A parametrized boundary piece with tangent, arc element and unit
    outer normal, oriented counterclockwise (interior on the left)."""

    kind: str
    param_range: tuple[float, float]
    position: Callable
    tangent: Callable
    normal: Callable
    arc_element: Callable

    def params(self, n: int, endpoint: bool = True):
        a, b = self.param_range
        return np.linspace(a, b, n) if endpoint else a + (b - a) * (np.arange(n) + 0.5) / n


def _make_ac(dom: TricomiDomain) -> BoundaryCurve:
    # Parameter t = -y in [0, -y_C]; runs from A down to C.
    t_max = -dom.y_C

    def position(t):
        return (2.0 * dom.x0 + (2.0 / 3.0) * t**1.5, -t)

    def tangent(t):
        return (np.sqrt(t), -np.ones_like(np.asarray(t, dtype=float)))

    def normal(t):
        s = 1.0 / np.sqrt(1.0 + t)
        return (-s, -np.sqrt(t) * s)

    def arc_element(t):
        return np.sqrt(1.0 + t)

    return BoundaryCurve("AC", (0.0, t_max), position, tangent, normal, arc_element)


def _make_bc(dom: TricomiDomain) -> BoundaryCurve:
    # Parameter t = y in [y_C, 0]; runs from C up to B.

    def position(t):
        return (-(2.0 / 3.0) * (-t) ** 1.5, t)

    def tangent(t):
        return (np.sqrt(-t), np.ones_like(np.asarray(t, dtype=float)))

    def normal(t):
        s = 1.0 / np.sqrt(1.0 - t)
        return (s, -np.sqrt(-t) * s)

    def arc_element(t):
        return np.sqrt(1.0 - t)

    return BoundaryCurve("BC", (dom.y_C, 0.0), position, tangent, normal, arc_element)


def _make_sigma(dom: TricomiDomain) -> BoundaryCurve:
    # Parameter t = -x in [0, -2x0]; runs from B over the arc to A.

    def position(t):
        x = -np.asarray(t, dtype=float)
        return (x, dom.g(x))

    def tangent(t):
        # Undefined at the endpoints where g' blows up; use normal() there.
        x = -np.asarray(t, dtype=float)
        gp = dom.g_prime(x)
        return (-np.ones_like(x), -gp)

    def normal(t):
        # Endpoint-safe form h(x)^(-1) (x - x0, (2/3) g(x)^2).
        x = -np.asarray(t, dtype=float)
        hx = dom.h(x)
        return ((x - dom.x0) / hx, (2.0 / 3.0) * np.asarray(dom.g(x)) ** 2 / hx)

    def arc_element(t):
        # |r'| = (3/2) h(x) / g(x)^2, singular at the endpoints.
        x = -np.asarray(t, dtype=float)
        return 1.5 * dom.h(x) / np.asarray(dom.g(x)) ** 2

    return BoundaryCurve("Sigma", (0.0, -2.0 * dom.x0), position, tangent, normal, arc_element)


def flow(p, t):
    """Exact dilation flow (x e^{-3t}, y e^{-2t}); t = +inf returns the origin."""
    x, y = float(p[0]), float(p[1])
    if t < 0.0:
        raise ValueError("flow time must be nonnegative")
    if math.isinf(t):
        return (0.0, 0.0)
    return (x * math.exp(-3.0 * t), y * math.exp(-2.0 * t))


def boundary_points(dom: TricomiDomain, n: int):
    """n points distributed over the three boundary pieces (corners included)."""
    n_piece = max(2, n // 3)
    pts = []
    for kind in ("Sigma", "AC", "BC"):
        curve = dom.boundary_curve(kind)
        for t in curve.params(n_piece):
            x, y = curve.position(t)
            pts.append((float(x), float(y)))
    return pts


def verify_star_shaped(
    dom: TricomiDomain,
    n_boundary: int,
    n_times: int,
    t_max: float = 10.0,
    membership: Callable | None = None,
) -> VerificationReport:
    """Check that dilation-flow trajectories of boundary points stay inside.

    Samples n_boundary boundary points and n_times log-spaced flow times in
    [0, t_max] plus the t = +inf limit, and records the worst membership
    slack.  A different `membership` predicate turns this into a negative
    control (e.g. the x-reflected domain, which the flow of Omega exits).
    """
    if n_boundary < 2 or n_times < 2:
        raise ValueError("need at least 2 boundary points and 2 flow times")
    slack_of = membership if membership is not None else dom.membership_slack
    times = np.concatenate([[0.0], np.geomspace(1e-6, t_max, n_times - 1), [math.inf]])
    worst = math.inf
    worst_at = (dom.B, 0.0)
    for p in boundary_points(dom, n_boundary):
        for t in times:
            s = slack_of(flow(p, t))
            if s < worst:
                worst, worst_at = s, (p, float(t))
    tol = 1e-10
    return VerificationReport(
        claim_id="star_shaped",
        x0=dom.x0,
        grid_size=n_boundary * len(times),
        worst_margin=worst,
        worst_location=worst_at[0][0],
        passed=worst >= -tol,
        notes=f"tolerance={tol:g}; worst point={worst_at[0]}, t={worst_at[1]:g}",
    )


def reflected_membership(dom: TricomiDomain) -> Callable:
    """Membership slack of the x-reflected domain (negative-control helper)."""
    return lambda p: dom.membership_slack((-p[0], p[1]))
