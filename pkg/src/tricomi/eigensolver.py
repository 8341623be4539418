"""Finite-difference discretization of T = -y d_xx - d_yy on the normal
Tricomi domain, with homogeneous Dirichlet data on AC and sigma only.

The characteristic BC carries no datum: nodes adjacent to BC satisfy the
PDE itself through interior-biased one-sided second differences, so no
boundary rows are written there.  Dirichlet values are imposed at the
nearest node projection (first-order cut cells).  The resulting operator
is real and nonsymmetric; the real spectrum is extracted by shift-invert
Arnoldi around a small positive shift.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import TricomiDomain
from .pohozaev import (
    BoundaryNormBundle,
    BoundaryTrace,
    area_l2_norm_sq,
    bc_trace,
    norm_bundle_from_traces,
    sigma_trace,
)
from .report import fmt

__all__ = [
    "Grid",
    "TricomiOperator",
    "EigenPair",
    "assemble",
    "solve_real_spectrum",
    "trace_norms",
    "extract_traces",
    "write_field_binary",
    "read_field_binary",
    "write_field_csv",
]

# Node classification codes.
EXTERIOR, INTERIOR, DIRICHLET, FREE_BC = 0, 1, 2, 3

_REAL_EIG_RTOL = 1e-8
_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class Grid:
    """Tensor node grid over a padded bounding box of the domain."""

    nx: int
    ny: int
    xs: np.ndarray
    ys: np.ndarray
    inside: np.ndarray      # (nx, ny) bool, node strictly usable as unknown
    labels: np.ndarray = field(default=None)

    @classmethod
    def build(cls, dom: TricomiDomain, nx: int, ny: int) -> "Grid":
        if nx < 32 or ny < 32:
            raise ValueError("grid must have at least 32 nodes per direction")
        y_top = dom.g(dom.x0)
        pad_x = 0.01 * abs(2.0 * dom.x0)
        pad_y = 0.01 * (y_top - dom.y_C)
        xs = np.linspace(2.0 * dom.x0 - pad_x, pad_x, nx)
        ys = np.linspace(dom.y_C - pad_y, y_top + pad_y, ny)
        inside = dom.contains_grid(xs[:, None], ys[None, :])
        # Resolution check along the parabolic diameter.
        if int(np.count_nonzero(inside[:, np.argmin(np.abs(ys))])) < 32:
            raise ValueError("grid under-resolves the parabolic diameter")
        return cls(nx=nx, ny=ny, xs=xs, ys=ys, inside=inside)

    @property
    def hx(self) -> float:
        return float(self.xs[1] - self.xs[0])

    @property
    def hy(self) -> float:
        return float(self.ys[1] - self.ys[0])


def _crossing_kind(dom: TricomiDomain, x: float, y: float, dx: float, dy: float) -> int:
    """Which boundary an axis-aligned stencil arm from an interior node crosses.

    Horizontal arms in y >= 0 and upward arms exit through sigma; for y < 0
    a rightward arm crosses BC, a leftward arm crosses AC, and a downward
    arm is classified by the side of the axis x = x0.
    """
    if dy > 0:
        return DIRICHLET                      # sigma
    if dy < 0:
        return FREE_BC if x >= dom.x0 else DIRICHLET  # BC vs AC near C
    if y >= 0.0:
        return DIRICHLET                      # sigma
    return FREE_BC if dx > 0 else DIRICHLET   # BC right, AC left


_FRACTION_FLOOR = 1e-3


def _dirichlet_fraction(dom: TricomiDomain, x: float, y: float,
                        dx: float, dy: float) -> float:
    """Fraction of the arm (dx, dy) from an interior node to the Dirichlet
    boundary crossing, from the closed forms of sigma and AC."""
    x0 = dom.x0
    if dy > 0.0:                                   # upward into sigma
        y_b = np.cbrt(max(9.0 * (x0 * x0 - (x - x0) ** 2) / 4.0, 0.0))
        theta = (y_b - y) / dy
    elif dy < 0.0:                                 # downward into AC (x < x0)
        y_b = -((1.5 * max(x - 2.0 * x0, 0.0)) ** (2.0 / 3.0))
        theta = (y_b - y) / dy
    elif y >= 0.0:                                 # horizontal into sigma
        half = math.sqrt(max(x0 * x0 - (4.0 / 9.0) * y**3, 0.0))
        x_b = x0 + half if dx > 0.0 else x0 - half
        theta = (x_b - x) / dx
    else:                                          # leftward into AC
        x_b = 2.0 * x0 + (2.0 / 3.0) * (-y) ** 1.5
        theta = (x_b - x) / dx
    return min(max(theta, _FRACTION_FLOOR), 1.0)


@dataclass
class TricomiOperator:
    """Assembled sparse operator restricted to the interior unknowns."""

    dom: TricomiDomain
    grid: Grid
    matrix: sp.csr_matrix
    index: np.ndarray        # (nx, ny) int, -1 for non-unknowns
    nodes: np.ndarray        # (n_unknowns, 2) node (i, j)
    full_stencil: np.ndarray  # rows whose stencil is fully centered interior

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def to_vector(self, F: np.ndarray) -> np.ndarray:
        return F[self.nodes[:, 0], self.nodes[:, 1]]

    def to_field(self, v: np.ndarray) -> np.ndarray:
        F = np.zeros((self.grid.nx, self.grid.ny))
        F[self.nodes[:, 0], self.nodes[:, 1]] = v
        return F


def assemble(dom: TricomiDomain, grid: Grid,
             stabilization: float = 0.5) -> TricomiOperator:
    """Second-order centered differences inside, one-sided toward BC.

    In the hyperbolic half the centered scheme admits a parasitic branch of
    grid-oscillatory modes (the matrix is similar, via an alternating-sign
    diagonal, to one whose Perron mode is an x-checkerboard); a fourth-
    difference term of size O(h^2) per direction damps that branch without
    changing the second-order interior consistency.  `stabilization` scales
    it; 0 disables.
    """
    nx, ny = grid.nx, grid.ny
    hx, hy = grid.hx, grid.hy
    inside = grid.inside
    index = -np.ones((nx, ny), dtype=np.int64)
    nodes = np.argwhere(inside)
    index[nodes[:, 0], nodes[:, 1]] = np.arange(len(nodes))
    labels = np.where(inside, INTERIOR, EXTERIOR).astype(np.int8)

    rows, cols, vals = [], [], []
    full = np.ones(len(nodes), dtype=bool)

    def add(r, i, j, v):
        rows.append(r)
        cols.append(index[i, j])
        vals.append(v)

    def second_diff(r, i, j, axis, coeff, h):
        """coeff * u'' along one axis at node (i, j), biased off BC arms."""
        if axis == 0:
            nb = [(i - 1, j), (i + 1, j)]
        else:
            nb = [(i, j - 1), (i, j + 1)]
        ok = [0 <= a < nx and 0 <= b < ny and inside[a, b] for a, b in nb]
        x, y = grid.xs[i], grid.ys[j]
        inv = coeff / h**2
        if all(ok):
            add(r, *nb[0], inv)
            add(r, i, j, -2.0 * inv)
            add(r, *nb[1], inv)
            return True
        full[r] = False
        free_arm = [False, False]
        frac = [1.0, 1.0]
        for k, (a, b) in enumerate(nb):
            if ok[k]:
                continue
            dx = (a - i) * hx if axis == 0 else 0.0
            dy = (b - j) * hy if axis == 1 else 0.0
            kind = _crossing_kind(dom, x, y, dx, dy)
            if 0 <= a < nx and 0 <= b < ny and labels[a, b] == EXTERIOR:
                labels[a, b] = kind
            free_arm[k] = kind == FREE_BC
            if kind == DIRICHLET:
                frac[k] = _dirichlet_fraction(dom, x, y, dx, dy)
        if not any(free_arm):
            # Zero imposed at the boundary crossings: unequal-arm second
            # difference with arm lengths frac*h (boundary values drop out).
            a_f, b_f = frac
            add(r, i, j, -2.0 * inv / (a_f * b_f))
            for k, (nbi, nbj) in enumerate(nb):
                if ok[k]:
                    add(r, nbi, nbj, 2.0 * inv / (frac[k] * (a_f + b_f)))
            return True
        # Interior-biased one-sided second difference away from BC.
        step = -1 if free_arm[1] else 1
        if axis == 0:
            chain = [(i, j), (i + step, j), (i + 2 * step, j)]
        else:
            chain = [(i, j), (i, j + step), (i, j + 2 * step)]
        usable = all(0 <= a < nx and 0 <= b < ny and inside[a, b] for a, b in chain[1:])
        if not usable:
            return False
        add(r, *chain[0], inv)
        add(r, *chain[1], -2.0 * inv)
        add(r, *chain[2], inv)
        return True

    for r, (i, j) in enumerate(nodes):
        x, y = grid.xs[i], grid.ys[j]
        if abs(y) > 1e-14:
            second_diff(r, i, j, 0, -y, hx)
        second_diff(r, i, j, 1, -1.0, hy)

    if stabilization > 0.0:
        d4 = ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0))
        for r, (i, j) in enumerate(nodes):
            y = grid.ys[j]
            if y >= 0.0:
                continue
            if 2 <= i < nx - 2 and all(inside[i + k, j] for k in (-2, -1, 1, 2)):
                c = stabilization * abs(y) / hx**2
                for k, wgt in d4:
                    add(r, i + k, j, c * wgt)
            if 2 <= j < ny - 2 and all(inside[i, j + k] for k in (-2, -1, 1, 2)):
                c = stabilization / hy**2
                for k, wgt in d4:
                    add(r, i, j + k, c * wgt)

    A = sp.csr_matrix((vals, (rows, cols)), shape=(len(nodes), len(nodes)))
    object.__setattr__(grid, "labels", labels)
    return TricomiOperator(dom=dom, grid=grid, matrix=A, index=index,
                           nodes=nodes, full_stencil=full)


@dataclass
class EigenPair:
    """A discrete eigenvalue with its normalized grid eigenfunction."""

    lam: float
    field: np.ndarray
    residual: float
    l2_norm_sq: float
    imag: float = 0.0
    trace_norms: BoundaryNormBundle | None = None
    traces: dict | None = None


def solve_real_spectrum(op: TricomiOperator, count: int, shift: float = 1e-3):
    """Up to `count` smallest-magnitude eigenpairs via shift-invert Arnoldi.

    Returns (real_pairs, complex_diagnostics).  Pairs whose imaginary part
    exceeds 1e-8 relative are reported in the diagnostics list and excluded
    from the real spectrum.  Each real pair is normalized to unit L2(Omega)
    norm with nonnegative mean and carries its algebraic residual.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    k = min(count, op.n - 2)
    v0 = np.full(op.n, 1.0 / math.sqrt(op.n))  # fixed start vector: reproducible runs
    try:
        w, V = spla.eigs(op.matrix.astype(float), k=k, sigma=shift, which="LM", v0=v0)
    except RuntimeError as exc:
        raise RuntimeError(
            f"shift-invert factorization failed ({exc}); try a finer grid "
            "or a different shift") from exc

    order = np.argsort(np.abs(w))
    real_pairs, complex_diag = [], []
    A = op.matrix
    for idx in order:
        lam = w[idx]
        v = V[:, idx]
        if abs(lam.imag) > _REAL_EIG_RTOL * abs(lam):
            complex_diag.append(complex(lam))
            continue
        lam_r = float(lam.real)
        v = np.real(v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v))])))
        res = float(np.linalg.norm(A @ v - lam_r * v) / np.linalg.norm(v))
        F = op.to_field(v)
        nrm_sq = area_l2_norm_sq(op.dom, op.grid.xs, op.grid.ys, F)
        if nrm_sq > 0:
            F = F / math.sqrt(nrm_sq)
        if float(np.sum(F)) < 0.0:
            F = -F
        real_pairs.append(EigenPair(lam=lam_r, field=F, residual=res,
                                    l2_norm_sq=1.0, imag=float(lam.imag)))
    return real_pairs, complex_diag


# -- boundary trace extraction ---------------------------------------------

class _FieldSampler:
    """Bilinear sampling of a nodal field restricted to fully-interior cells."""

    def __init__(self, grid: Grid, F: np.ndarray, valid: np.ndarray | None = None):
        self.grid = grid
        self.F = F
        self.valid = grid.inside if valid is None else valid

    def __call__(self, x: float, y: float):
        g = self.grid
        i = int(np.clip(np.searchsorted(g.xs, x) - 1, 0, g.nx - 2))
        j = int(np.clip(np.searchsorted(g.ys, y) - 1, 0, g.ny - 2))
        if not (self.valid[i, j] and self.valid[i + 1, j]
                and self.valid[i, j + 1] and self.valid[i + 1, j + 1]):
            return None
        tx = (x - g.xs[i]) / g.hx
        ty = (y - g.ys[j]) / g.hy
        f = self.F
        return ((1 - tx) * (1 - ty) * f[i, j] + tx * (1 - ty) * f[i + 1, j]
                + (1 - tx) * ty * f[i, j + 1] + tx * ty * f[i + 1, j + 1])

    def inward(self, x: float, y: float, nx_in: float, ny_in: float, d0: float):
        """Sample stepping further along the inward direction if needed."""
        for mult in (1.0, 1.5, 2.0, 3.0, 4.0, 6.0):
            v = self(x + mult * d0 * nx_in, y + mult * d0 * ny_in)
            if v is not None:
                return v
        return 0.0


def _gradient_grids(grid: Grid, F: np.ndarray):
    """One-sided/centered difference gradients on interior nodes."""
    nx, ny, hx, hy = grid.nx, grid.ny, grid.hx, grid.hy
    inside = grid.inside
    Ux = np.zeros_like(F)
    Uy = np.zeros_like(F)
    valid = np.zeros_like(inside)

    def axis_grad(shift_minus, shift_plus, shift_2plus, shift_2minus, h):
        g = np.full_like(F, np.nan)
        ok_c = shift_minus[0] & shift_plus[0]
        g_c = (shift_plus[1] - shift_minus[1]) / (2 * h)
        ok_f = ~shift_minus[0] & shift_plus[0] & shift_2plus[0]
        g_f = (-3 * F + 4 * shift_plus[1] - shift_2plus[1]) / (2 * h)
        ok_b = ~shift_plus[0] & shift_minus[0] & shift_2minus[0]
        g_b = (3 * F - 4 * shift_minus[1] + shift_2minus[1]) / (2 * h)
        g = np.where(ok_c, g_c, np.where(ok_f, g_f, np.where(ok_b, g_b, np.nan)))
        return g, ok_c | ok_f | ok_b

    def shifted(di, dj):
        ok = np.zeros((nx, ny), dtype=bool)
        val = np.zeros((nx, ny))
        si = slice(max(di, 0), nx + min(di, 0))
        ti = slice(max(-di, 0), nx + min(-di, 0))
        sj = slice(max(dj, 0), ny + min(dj, 0))
        tj = slice(max(-dj, 0), ny + min(-dj, 0))
        ok[si, sj] = inside[ti, tj]
        val[si, sj] = F[ti, tj]
        return ok, val

    Ux, okx = axis_grad(shifted(1, 0), shifted(-1, 0), shifted(-2, 0), shifted(2, 0), hx)
    Uy, oky = axis_grad(shifted(0, 1), shifted(0, -1), shifted(0, -2), shifted(0, 2), hy)
    valid = inside & okx & oky
    Ux = np.where(valid, Ux, 0.0)
    Uy = np.where(valid, Uy, 0.0)
    return Ux, Uy, valid


def extract_traces(pair: EigenPair, dom: TricomiDomain, grid: Grid,
                   n_bc: int = 400, n_sigma: int = 400) -> dict:
    """Interpolated boundary traces of the eigenfunction and its gradient.

    On BC (no data imposed) the values are pulled back a short distance
    along the inward normal and sampled bilinearly.  On sigma and AC the
    trace of u is the imposed Dirichlet value 0, and the gradient is the
    normal derivative reconstructed from two interior samples.
    """
    F = pair.field
    Ux, Uy, valid = _gradient_grids(grid, F)
    s_u = _FieldSampler(grid, F)
    s_x = _FieldSampler(grid, Ux, valid)
    s_y = _FieldSampler(grid, Uy, valid)
    d = 2.0 * max(grid.hx, grid.hy)

    # BC: free boundary, sample u and grad at pulled-back points.
    bc = bc_trace(dom, n_bc)
    curve = bc.curve
    u, ux, uy = [], [], []
    for t in bc.params:
        x, y = curve.position(t)
        nx_o, ny_o = curve.normal(t)
        u.append(s_u.inward(x, y, -nx_o, -ny_o, d))
        ux.append(s_x.inward(x, y, -nx_o, -ny_o, d))
        uy.append(s_y.inward(x, y, -nx_o, -ny_o, d))
    bc = bc_trace(dom, n_bc, u=np.array(u), ux=np.array(ux), uy=np.array(uy))

    # sigma: Dirichlet side, u = 0, grad = (normal derivative) * n.
    sg = sigma_trace(dom, n_sigma)
    curve = sg.curve
    ux, uy = [], []
    for t in sg.params:
        x, y = curve.position(t)
        nx_o, ny_o = curve.normal(t)
        u1 = s_u.inward(x, y, -nx_o, -ny_o, d)
        u2 = s_u.inward(x, y, -nx_o, -ny_o, 2.0 * d)
        un = (-4.0 * u1 + u2) / (2.0 * d)   # normal derivative, u = 0 on sigma
        ux.append(un * nx_o)
        uy.append(un * ny_o)
    sg = sigma_trace(dom, n_sigma, ux=np.array(ux), uy=np.array(uy))
    return {"BC": bc, "Sigma": sg}


def trace_norms(pair: EigenPair, dom: TricomiDomain, grid: Grid) -> BoundaryNormBundle:
    """Boundary norms of the eigenpair, attaching traces to the pair."""
    traces = extract_traces(pair, dom, grid)
    pair.traces = traces
    bundle = norm_bundle_from_traces(traces["BC"], traces["Sigma"])
    pair.trace_norms = bundle
    return bundle


def synthetic_trace_norms(dom: TricomiDomain, grid: Grid, F: np.ndarray,
                          n_bc: int = 400, n_sigma: int = 400) -> BoundaryNormBundle:
    """Norms of an arbitrary nodal field, without the Dirichlet shortcut."""
    pair = EigenPair(lam=1.0, field=F, residual=0.0, l2_norm_sq=1.0)
    traces = extract_traces(pair, dom, grid, n_bc=n_bc, n_sigma=n_sigma)
    return norm_bundle_from_traces(traces["BC"], traces["Sigma"])


# -- field export -----------------------------------------------------------

_HEADER = struct.Struct("<6d")


def write_field_binary(path, grid: Grid, F: np.ndarray) -> None:
    """Flat binary: nx, ny and the bounding box as 8-byte floats, then
    row-major float64 values."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(float(grid.nx), float(grid.ny),
                              float(grid.xs[0]), float(grid.xs[-1]),
                              float(grid.ys[0]), float(grid.ys[-1])))
        fh.write(np.ascontiguousarray(F, dtype="<f8").tobytes())


def read_field_binary(path):
    with open(path, "rb") as fh:
        nx, ny, x0, x1, y0, y1 = _HEADER.unpack(fh.read(_HEADER.size))
        nx, ny = int(nx), int(ny)
        F = np.frombuffer(fh.read(), dtype="<f8").reshape(nx, ny)
    return {"nx": nx, "ny": ny, "bbox": (x0, x1, y0, y1), "field": F}


def write_field_csv(path, grid: Grid, F: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,y,u\n")
        for i, x in enumerate(grid.xs):
            for j, y in enumerate(grid.ys):
                fh.write(f"{fmt(float(x))},{fmt(float(y))},{fmt(float(F[i, j]))}\n")
