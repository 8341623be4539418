"""The x0-dependent constant ledger for the eigenfunction bound.

All constants are closed-form functions of x0 with a regime switch at
x0 = -sqrt(3)/4 (the critical parabolic half-diameter) and branch switches
at x0 = -1/2 and x0 = -2/3.  The epsilon-dependent constants enter the
boundary-integral estimates and are minimized by `optimize_epsilons`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import TricomiDomain

__all__ = [
    "ConstantLedger",
    "ledger",
    "g1",
    "g2",
    "G1",
    "G2",
    "optimize_epsilons",
    "SQRT3",
    "SQRT33",
    "X0_CRITICAL",
]

SQRT3 = math.sqrt(3.0)
SQRT33 = math.sqrt(33.0)

# Below this abscissa the modulus h develops two symmetric minima and the
# whole constant family switches.
X0_CRITICAL = -SQRT3 / 4.0

# Abscissas where the two-sided bound on G2 is sharp (x_- = x1 resp. x_+ = x2).
X3 = -math.sqrt((15.0 + SQRT33) / 32.0)
X4 = -math.sqrt((15.0 - SQRT33) / 32.0)


def g1(dom: TricomiDomain, x):
    """3x(2x - 3x0); vanishes at 0 and (3/2)x0, equals 6x0^2 at 2x0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 2.0 * dom.x0 - 1e-12) or np.any(x > 1e-12):
        raise ValueError("x outside [2*x0, 0]")
    out = 3.0 * x * (2.0 * x - 3.0 * dom.x0)
    return float(out) if out.ndim == 0 else out


def g2(dom: TricomiDomain, x):
    """4(2x - x0) g(x)^(3/2); vanishes at the endpoints and at x0/2."""
    x = np.asarray(x, dtype=float)
    gx = np.asarray(dom.g(x))
    out = 4.0 * (2.0 * x - dom.x0) * gx**1.5
    return float(out) if out.ndim == 0 else out


def G1(dom: TricomiDomain, x):
    """g1(x)/h(x), finite on all of [2x0, 0] since h > 0."""
    out = np.asarray(g1(dom, x)) / np.asarray(dom.h(x))
    return float(out) if out.ndim == 0 else out


def G2(dom: TricomiDomain, x):
    """g2(x)/h(x), finite on all of [2x0, 0]."""
    out = np.asarray(g2(dom, x)) / np.asarray(dom.h(x))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ConstantLedger:
    """All x0-dependent constants, critical abscissas and branch labels.

    x_plus/x_minus (the minima of h) exist only for x0 < -sqrt(3)/4, as do
    the second-family constants C7, C8, C11, C12.
    """

    x0: float
    regime: str
    y_C: float
    x_plus: Optional[float]
    x_minus: Optional[float]
    x1: float
    x2: float
    x3: float
    x4: float
    C3: float
    C4: float
    C5: float
    C6: float
    C7: Optional[float]
    C8: Optional[float]
    C9: float
    C10: float
    C11: Optional[float]
    C12: Optional[float]
    C13: float
    _K12: float = field(repr=False)  # common factor of C1, C2

    def C1(self, eps: float) -> float:
        if eps <= 0:
            raise ValueError("eps must be positive")
        return self._K12 * (1.0 + eps)

    def C2(self, eps: float) -> float:
        if eps <= 0:
            raise ValueError("eps must be positive")
        return self._K12 * (1.0 + 1.0 / eps)

    def C14(self, eps: float) -> float:
        if eps <= 0:
            raise ValueError("eps must be positive")
        upper = self.C6 if self.x0 >= X0_CRITICAL else self.C8
        return upper + 0.5 * eps * self.C13

    def C15(self, eps: float) -> float:
        if eps <= 0:
            raise ValueError("eps must be positive")
        lower = self.C5 if self.x0 >= X0_CRITICAL else self.C7
        return -lower + self.C13 / (2.0 * eps)

    def to_dict(self, eps: float = 1.0) -> dict:
        d = {
            "x0": self.x0,
            "regime": self.regime,
            "y_C": self.y_C,
            "x_plus": self.x_plus,
            "x_minus": self.x_minus,
            "x1": self.x1,
            "x2": self.x2,
            "x3": self.x3,
            "x4": self.x4,
            "C1_eps1": self.C1(eps),
            "C2_eps1": self.C2(eps),
            "C3": self.C3,
            "C4": self.C4,
            "C5": self.C5,
            "C6": self.C6,
            "C7": self.C7,
            "C8": self.C8,
            "C9": self.C9,
            "C10": self.C10,
            "C11": self.C11,
            "C12": self.C12,
            "C13": self.C13,
            "C14_eps1": self.C14(eps),
            "C15_eps1": self.C15(eps),
        }
        return d


def _regime(x0: float) -> str:
    if x0 >= X0_CRITICAL:
        return "R1"
    if x0 > -0.5:
        return "R2a"
    if x0 > -2.0 / 3.0:
        return "R2b"
    return "R2c"


def ledger(x0: float) -> ConstantLedger:
    """Evaluate every constant by its closed form with the regime-correct branch."""
    if not (x0 < 0.0) or not math.isfinite(x0):
        raise ValueError(f"x0 must be a finite negative real, got {x0!r}")
    dom = TricomiDomain(x0)
    ax = abs(x0)

    # Common factor of the characteristic-side constants C1, C2.
    root = math.sqrt(1.0 + (3.0 * ax / 2.0) ** (2.0 / 3.0))
    K12 = 6.0 * ax / root
    C3 = (3.0 * ax / 2.0) ** (1.0 / 3.0) / root

    second_family = x0 < X0_CRITICAL
    if second_family:
        disc = math.sqrt(x0 * x0 - 3.0 / 16.0)
        x_plus, x_minus = x0 + disc, x0 - disc
        hmin = math.sqrt(x0 * x0 - 3.0 / 64.0)
    else:
        x_plus = x_minus = None
        hmin = None

    # Maximum of h over [2x0, 0]: |x0| down to x0 = -2/3, then h(x0).
    C4 = ax if x0 >= -2.0 / 3.0 else (1.5 * x0**4) ** (1.0 / 3.0)

    # First-family bounds on G1 = g1/h and G2 = g2/h.
    denom6 = math.sqrt(2.0 ** (4.0 / 3.0) + 9.0 * ax ** (2.0 / 3.0))
    C5 = -(1.5 ** (8.0 / 3.0)) * ax ** (2.0 / 3.0)
    C6 = 2.0 ** (8.0 / 3.0) * 3.0 * ax / denom6
    C9 = -(2.0 ** (-19.0 / 6.0)) * 3.0 ** (2.0 / 3.0) * (SQRT33 + 3.0) \
        * math.sqrt(15.0 + SQRT33) * ax ** (2.0 / 3.0)
    C10 = 2.0 ** (-11.0 / 6.0) * 3.0 * (SQRT33 - 3.0) \
        * math.sqrt(15.0 - SQRT33) * ax / denom6

    if second_family:
        C7 = -(1.5**3) * x0 * x0 / hmin
        C8 = C6 if x0 > -0.5 else 6.0 * x0 * x0 / hmin
        C11 = -(2.0**-3.5) * 3.0 * (SQRT33 + 3.0) * math.sqrt(15.0 + SQRT33) * x0 * x0 / hmin
        C12 = C10 if x0 > -0.5 else \
            2.0**-3.5 * 3.0 * (SQRT33 - 3.0) * math.sqrt(15.0 - SQRT33) * x0 * x0 / hmin
        C13 = abs(C11)
    else:
        C7 = C8 = C11 = C12 = None
        C13 = abs(C9)

    return ConstantLedger(
        x0=x0,
        regime=_regime(x0),
        y_C=dom.y_C,
        x_plus=x_plus,
        x_minus=x_minus,
        x1=(7.0 + SQRT33) / 8.0 * x0,
        x2=(7.0 - SQRT33) / 8.0 * x0,
        x3=X3,
        x4=X4,
        C3=C3,
        C4=C4,
        C5=C5,
        C6=C6,
        C7=C7,
        C8=C8,
        C9=C9,
        C10=C10,
        C11=C11,
        C12=C12,
        C13=C13,
        _K12=K12,
    )


_EPS_LO, _EPS_HI = 1e-6, 1e6


def _bracket_sum(led: ConstantLedger, bundle, eps1: float, eps2: float) -> float:
    a1 = bundle.w_ux_L2_BC**2
    a2 = bundle.uy_L2_BC**2
    cross = (bundle.re_u_L2_BC + bundle.im_u_L2_BC) * (bundle.w_ux_L2_BC + bundle.uy_L2_BC)
    b1 = bundle.w_ux_L2_sigma**2
    b2 = bundle.uy_L2_sigma**2
    return (
        led.C1(eps1) * a1
        + led.C2(eps1) * a2
        + led.C3 * cross
        + led.C14(eps2) * b1
        + led.C15(eps2) * b2
    )


def optimize_epsilons(bundle, led: ConstantLedger):
    """Pick the epsilons that make the eigenfunction bound tightest.

    The eps1 terms form a*eps1 + b/eps1 with a, b read off C1, C2, so the
    minimizer is sqrt(b/a) in closed form.  eps2 is found by golden-section
    on log(eps2) over [1e-6, 1e6].  Returns (eps1, eps2, rhs) where rhs is
    the minimized right-hand side of the bound (the square root of the
    bracketed sum).
    """
    for name in ("u_L2_BC", "re_u_L2_BC", "im_u_L2_BC", "w_ux_L2_BC",
                 "uy_L2_BC", "w_ux_L2_sigma", "uy_L2_sigma"):
        if getattr(bundle, name) < 0:
            raise ValueError(f"norm {name} must be nonnegative")

    a = bundle.w_ux_L2_BC**2  # coefficient of eps1
    b = bundle.uy_L2_BC**2    # coefficient of 1/eps1
    if a > 0 and b > 0:
        eps1 = math.sqrt(b / a)
    elif a > 0:
        eps1 = _EPS_LO
    elif b > 0:
        eps1 = _EPS_HI
    else:
        eps1 = 1.0
    eps1 = min(max(eps1, _EPS_LO), _EPS_HI)

    # Golden-section in log eps2; the objective a*eps + b/eps + c is
    # unimodal there.
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = math.log(_EPS_LO), math.log(_EPS_HI)
    f = lambda le: _bracket_sum(led, bundle, eps1, math.exp(le))
    c = hi - phi * (hi - lo)
    d = lo + phi * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - phi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + phi * (hi - lo)
            fd = f(d)
    eps2 = math.exp(0.5 * (lo + hi))
    total = _bracket_sum(led, bundle, eps1, eps2)
    return eps1, eps2, math.sqrt(max(total, 0.0))
