"""Evaluation, L2 norm and sup-norm scans of the dihedral forms.

Every value is reported with the factor e^{pi T/2} built in, inherited from
`besselk`; ratios sup / ||.||_2 do not depend on it.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq, minimize_scalar

from .besselk import bessel_row
from .coeff import CoeffTable, hecke_coeffs, spectral_parameter
from .quadfield import FieldContext

log = logging.getLogger(__name__)

SCALE_FLAG = "exp(pi*T/2)"
_TAIL_MARGIN = 6.0


class CoefficientShortage(ValueError):
    def __init__(self, required: int, available: int):
        super().__init__(f"coefficient table has N={available}, evaluation needs N={required}")
        self.required = required
        self.available = available


@dataclass(frozen=True)
class SurfacePoint:
    x: float
    y: float
    coset: int | None = None

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"point must lie in the upper half-plane, got y={self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class FormHandle:
    ctx: FieldContext
    k: int
    T: float
    coeffs: CoeffTable = field(repr=False)
    scale: str = SCALE_FLAG


def make_form(ctx: FieldContext, k: int, n_max: int) -> FormHandle:
    return FormHandle(ctx=ctx, k=k, T=spectral_parameter(ctx, k), coeffs=hecke_coeffs(ctx, k, n_max))


def form_for_height(ctx: FieldContext, k: int, y_min: float, tol: float = 1e-10) -> FormHandle:
    """Handle with enough coefficients to evaluate down to height y_min."""
    T = spectral_parameter(ctx, k)
    return make_form(ctx, k, truncation_length(T, y_min, tol))


# -- truncation ----------------------------------------------------------------

def _decay_exponent(T: float, x: float) -> float:
    """-log b(T, x) to leading order for x >= T (the saddle-point exponent)."""
    if x <= T:
        return 0.0
    return math.sqrt((x - T) * (x + T)) - T * math.acos(T / x)


def truncation_length(T: float, y: float, tol: float) -> int:
    """Smallest N with the tail sum over n > N below tol times the leading scale.

    We find x* with exponent(x*) = log(1/tol) plus a margin covering the divisor
    bound on a(n), the 2 sqrt(y) prefactor and the number of terms past x*.
    """
    if not y > 0:
        raise ValueError("y must be positive")
    if not (0 < tol <= 1e-2):
        raise ValueError("tol must lie in (0, 1e-2]")
    T = abs(T)
    step = 2 * math.pi * y
    target = math.log(1 / tol) + _TAIL_MARGIN + max(0.0, math.log(1 / step)) + 0.5 * max(0.0, math.log(y))
    hi = T + 1.0
    while _decay_exponent(T, hi) < target:
        hi = 2 * hi + 1
    x_star = brentq(lambda x: _decay_exponent(T, x) - target, T, hi, xtol=1e-8)
    # a(n) can reach d(n); absorb log d(n) <= log(n) into the cutoff
    x_star += math.log(max(2.0, x_star / step))
    return max(1, math.ceil(x_star / step))


# -- evaluation ----------------------------------------------------------------

def _require(handle: FormHandle, N: int):
    if handle.coeffs.N < N:
        raise CoefficientShortage(N, handle.coeffs.N)


def _radial(handle: FormHandle, y: float, N: int) -> np.ndarray:
    """2 sqrt(y) a(n) b(T, 2 pi n y) for n = 1..N."""
    n = np.arange(1, N + 1)
    b = bessel_row(handle.T, 2 * np.pi * n * y)
    return 2 * math.sqrt(y) * handle.coeffs.a[1:N + 1] * b


def eval_row(handle: FormHandle, xs, y: float, tol: float = 1e-10) -> np.ndarray:
    """Scaled phi at xs + iy, all on one horizontal line."""
    N = truncation_length(handle.T, y, tol)
    _require(handle, N)
    rad = _radial(handle, y, N)
    xs = np.asarray(xs, dtype=float)
    n = np.arange(1, N + 1)
    return np.cos(2 * np.pi * np.outer(xs, n)) @ rad


def eval_form(handle: FormHandle, z, tol: float = 1e-10) -> float:
    if isinstance(z, SurfacePoint):
        z = z.z
    z = complex(z)
    return float(eval_row(handle, [z.real], z.imag, tol)[0])


def eval_points(handle: FormHandle, zs, tol: float = 1e-10) -> np.ndarray:
    zs = np.asarray(zs, dtype=complex)
    out = np.empty(len(zs))
    for i, z in enumerate(zs):
        out[i] = eval_form(handle, z, tol)
    return out


# -- group action and Fricke reduction -------------------------------------------

def mobius_apply(g, z: complex) -> complex:
    a, b, c, d = g
    return (a * z + b) / (c * z + d)


def fricke(q: int, z: complex) -> complex:
    return -1 / (q * z)


def _ext_gcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def complete_matrix(c: int, d: int) -> tuple[int, int, int, int]:
    """Some (a, b) with ad - bc = 1."""
    g, s, t = _ext_gcd(d, -c)      # s d - t c = 1
    if g != 1:
        raise ValueError(f"bottom row ({c}, {d}) is not primitive")
    return (s, t, c, d)


def _best_lift(q: int, z: complex):
    """Element of Gamma_0(q) or Gamma_0(q) W_q raising Im z the most, or None."""
    x, y = z.real, z.imag
    best, best_h = None, y * (1 + 1e-13)
    cmax = int(1 / y) + 1
    for c in range(q, cmax + 1, q):
        d0 = round(-c * x)
        for d in range(d0 - 1, d0 + 2):
            if math.gcd(c, d) != 1:
                continue
            h = y / abs(c * z + d) ** 2
            if h > best_h:
                best, best_h = ("g", (c, d)), h
    Cmax = int(1 / (math.sqrt(q) * y)) + 1
    for C in range(1, Cmax + 1):
        if C % q == 0:
            continue
        D0 = round(-C * x)
        for D in range(D0 - 1, D0 + 2):
            if math.gcd(C, q * D) != 1:
                continue
            h = y / (q * abs(C * z + D) ** 2)
            if h > best_h:
                best, best_h = ("w", (C, D)), h
    return best


def fricke_reduce(q: int, z: complex, max_iter: int = 200) -> SurfacePoint:
    """Move z to maximal height under Gamma_0(q) + W_q, then into 0 <= x <= 1/2.

    coset records the parity of Fricke involutions used.
    """
    z = complex(z)
    flips = 0
    for _ in range(max_iter):
        lift = _best_lift(q, z)
        if lift is None:
            break
        kind, (c, d) = lift
        if kind == "g":
            z = mobius_apply(complete_matrix(c, d), z)
        else:
            C, D = c, d
            # gamma W_q with gamma = (a b; -qD C) has bottom row sqrt(q) (C, D)
            z = mobius_apply(complete_matrix(-q * D, C), fricke(q, z))
            flips += 1
    else:
        raise RuntimeError("reduction did not terminate")
    x = z.real - math.floor(z.real + 0.5)
    return SurfacePoint(abs(x), z.imag, coset=flips % 2)


def boundary_height(q: int, x: float, c_max: int = 80) -> float:
    """Lowest height at x not raised by any element of Gamma_0(q) + W_q."""
    best = 0.0
    for c in range(q, c_max * q + 1, q):
        for d in range(math.floor(-c * x) - 1, math.floor(-c * x) + 3):
            if math.gcd(c, d) == 1:
                r = 1 - (c * x + d) ** 2
                if r > 0:
                    best = max(best, math.sqrt(r) / c)
    for C in range(1, c_max + 1):
        if C % q == 0:
            continue
        for D in range(math.floor(-C * x) - 1, math.floor(-C * x) + 3):
            if math.gcd(C, q * D) == 1:
                r = 1 / q - (C * x + D) ** 2
                if r > 0:
                    best = max(best, math.sqrt(r) / C)
    return best


def scan_floor(q: int, samples: int = 2001) -> float:
    """Minimum height of the Fricke-reduced fundamental domain over 0 <= x <= 1/2."""
    xs = np.linspace(0.0, 0.5, samples)
    hs = np.array([boundary_height(q, float(x)) for x in xs])
    i = int(np.argmin(hs))
    lo, hi = xs[max(0, i - 1)], xs[min(samples - 1, i + 1)]
    res = minimize_scalar(lambda x: boundary_height(q, x), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return float(min(res.fun, hs[i]))


# -- L2 norm ---------------------------------------------------------------------

@dataclass
class NormResult:
    norm: float            # scaled ||phi||_2
    residual: float        # |n - 2n| relative change
    parts: dict = field(default_factory=dict)


_GX, _GW = leggauss(20)


def _gl(a: float, b: float, panels: int):
    edges = np.linspace(a, b, panels + 1)
    h = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + h[:, None] * _GX).ravel(), (h[:, None] * _GW).ravel()


def _parseval_strip(handle: FormHandle, y0: float, tol: float, density: int) -> float:
    """int_{y >= y0} int_0^1 |phi|^2 dx dy / y^2 = 2 sum a(n)^2 int_{2 pi n y0}^inf b^2 dt / t."""
    T = handle.T
    N = truncation_length(T, y0, tol)
    _require(handle, N)
    a2 = handle.coeffs.a[1:N + 1] ** 2
    starts = 2 * np.pi * y0 * np.arange(1, N + 1)
    t_hi = T + 1.0
    while _decay_exponent(T, t_hi) < 0.5 * math.log(1 / tol) + 20:
        t_hi *= 1.5
    t_hi = max(t_hi, starts[-1] * 1.01)
    # panel edges: every start point plus a log-grid resolving the oscillation
    step = min(0.5, 2 * math.pi / max(T, 1.0)) / density
    grid = np.exp(np.arange(math.log(starts[0]), math.log(t_hi) + step, step))
    near = np.searchsorted(starts, grid)
    gap = np.minimum(np.abs(grid - starts[np.clip(near - 1, 0, N - 1)]),
                     np.abs(grid - starts[np.clip(near, 0, N - 1)]))
    edges = np.unique(np.concatenate([starts, grid[gap > 1e-6 * grid]]))
    edges = edges[edges <= max(t_hi, starts[-1])]
    h = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + h[:, None] * _GX).ravel()
    weights = (h[:, None] * _GW).ravel()
    order = np.argsort(nodes)
    b = np.empty_like(nodes)
    b[order] = bessel_row(T, nodes[order])
    panel = (b ** 2 / nodes * weights).reshape(-1, len(_GX)).sum(axis=1)
    tail = np.concatenate([np.cumsum(panel[::-1])[::-1], [0.0]])
    idx = np.searchsorted(edges, starts)
    return float(2 * np.sum(a2 * tail[idx]))


def _arc_region(handle: FormHandle, shift_q: int | None, tol: float, density: int) -> float:
    """Integral of |phi|^2 over the arc piece {0 <= x <= 1/2, 1 >= y >= sqrt(1 - x^2)} of F.

    With shift_q = q the integrand is sum_j |phi((w + j)/q)|^2 instead.
    y = 1 - c s^2 keeps the lower x limit sqrt(1 - y^2) smooth in s.
    """
    c = 1 - math.sqrt(3) / 2
    scale = 1.0 if shift_q is None else 1.0 / shift_q
    N = truncation_length(handle.T, (1 - c) * scale, tol)
    _require(handle, N)
    s_nodes, s_w = _gl(0.0, 1.0, 2 * density)
    total = 0.0
    n = np.arange(1, N + 1)
    x_panels = density * (1 + N // (8 if shift_q is None else 8 * shift_q))
    for s, ws in zip(s_nodes, s_w):
        y = 1 - c * s * s
        x_lo = math.sqrt(max(0.0, 1 - y * y))
        xs, wx = _gl(x_lo, 0.5, x_panels)
        rad = _radial(handle, y * scale, N)
        if shift_q is None:
            vals = np.cos(2 * np.pi * np.outer(xs, n)) @ rad
            inner = np.sum(wx * vals ** 2)
        else:
            inner = 0.0
            for j in range(shift_q):
                vals = np.cos(2 * np.pi * np.outer((xs + j) * scale, n)) @ rad
                inner += np.sum(wx * vals ** 2)
        total += ws * 2 * c * s * inner / y ** 2
    return 2 * total                        # both halves x < 0 and x > 0


def l2_norm_numeric(handle: FormHandle, tol: float = 1e-10) -> NormResult:
    """Scaled Petersson norm over Gamma_0(q)\\H.

    Cosets are I and S T^j, j = 0..q-1. The translates S T^j F are carried by
    W_q onto (F + j)/q, which together with F tile {y >= 1} u {|z - j/q| >= 1/q}.
    |phi| is W_q-invariant, so both pieces split into a Parseval strip plus arcs.
    """
    q = handle.ctx.q

    def run(density):
        top = _parseval_strip(handle, 1.0, tol, density)
        arc = _arc_region(handle, None, tol, density)
        bottom = _parseval_strip(handle, 1.0 / q, tol, density)
        caps = _arc_region(handle, q, tol, density)
        return {"strip_F": top, "arc_F": arc, "strip_q": bottom, "caps_q": caps}

    p1 = run(1)
    p2 = run(2)
    n1, n2 = sum(p1.values()), sum(p2.values())
    resid = abs(n2 - n1) / n2
    if resid > max(tol, 1e-8) * 1e3:
        raise ArithmeticError(f"L2 quadrature not converged: relative change {resid:.2e}")
    return NormResult(norm=math.sqrt(n2), residual=resid, parts=p2)


# -- sup-norm scan -----------------------------------------------------------------

@dataclass
class ScanGrid:
    """Points per oscillation wavelength in x and log y; refine the best cells."""
    points_per_wave: float = 6.0
    refine_top: int = 10
    y_floor: float | None = None
    tol: float = 1e-10


@dataclass
class ScanResult:
    sup_ratio: float
    argmax: SurfacePoint
    norm: float
    rows: list = field(default_factory=list)


def single_term_height(T: float, tol: float = 1e-10) -> float:
    """Smallest height from which one Fourier term suffices."""
    lo, hi = 1e-3, max(1.0, T)
    while truncation_length(T, hi, tol) > 1:
        hi *= 2
    for _ in range(60):
        mid = math.sqrt(lo * hi)
        if truncation_length(T, mid, tol) > 1:
            lo = mid
        else:
            hi = mid
    return hi


def _single_term_max(handle: FormHandle, y_lo: float) -> tuple[float, float]:
    """max over y >= y_lo of 2 sqrt(y) |b(T, 2 pi y)| (x = 0, a(1) = 1)."""
    T = handle.T
    y_hi = y_lo * 2
    while 2 * math.sqrt(y_hi) * math.exp(-_decay_exponent(T, 2 * math.pi * y_hi)) > 1e-20:
        y_hi *= 1.5
    ys = np.exp(np.linspace(math.log(y_lo), math.log(y_hi), 4000))
    vals = 2 * np.sqrt(ys) * np.abs(bessel_row(T, 2 * np.pi * ys))
    i = int(np.argmax(vals))
    lo, hi = ys[max(0, i - 1)], ys[min(len(ys) - 1, i + 1)]
    f = lambda y: -2 * math.sqrt(y) * abs(bessel_row(T, [2 * math.pi * y])[0])
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    if -res.fun > vals[i]:
        return -res.fun, res.x
    return float(vals[i]), float(ys[i])


def supnorm_scan(handle: FormHandle, grid: ScanGrid | None = None, norm: float | None = None) -> ScanResult:
    grid = grid or ScanGrid()
    T = max(handle.T, 1.0)
    q = handle.ctx.q
    y_floor = grid.y_floor if grid.y_floor is not None else 0.98 * scan_floor(q)
    if norm is None:
        norm = l2_norm_numeric(handle, grid.tol).norm
    y_top = single_term_height(handle.T, grid.tol)
    dlog = 2 * math.pi / (T * grid.points_per_wave)
    ys = np.exp(np.arange(math.log(y_floor), math.log(y_top) + dlog, dlog))
    cells = []
    for y in ys:
        dx = min(0.5, 2 * math.pi * y / T) / grid.points_per_wave
        xs = np.linspace(0.0, 0.5, max(3, math.ceil(0.5 / dx) + 1))
        vals = np.abs(eval_row(handle, xs, y, grid.tol))
        for i in np.argsort(vals)[-grid.refine_top:]:
            cells.append((vals[i], xs[i], y, xs[1] - xs[0]))
    cells.sort(key=lambda c: -c[0])
    best_val, best_x, best_y = cells[0][0], cells[0][1], cells[0][2]
    for val, x, y, dx in cells[:grid.refine_top]:
        for _ in range(2):
            rx = minimize_scalar(lambda t: -abs(eval_form(handle, complex(t, y), grid.tol)),
                                 bounds=(max(0.0, x - dx), min(0.5, x + dx)), method="bounded",
                                 options={"xatol": 1e-9})
            x = rx.x
            y_lo, y_hi = max(y_floor, y * math.exp(-dlog)), y * math.exp(dlog)
            ry = minimize_scalar(lambda t: -abs(eval_form(handle, complex(x, t), grid.tol)),
                                 bounds=(y_lo, y_hi), method="bounded", options={"xatol": 1e-9})
            y = ry.x
            val = max(val, -ry.fun)
        if val > best_val:
            best_val, best_x, best_y = val, x, y
    tail_val, tail_y = _single_term_max(handle, y_top)
    if tail_val > best_val:
        best_val, best_x, best_y = tail_val, 0.0, tail_y
    ratio = best_val / norm
    row = {"k": handle.k, "T_k": handle.T, "sup_ratio": ratio,
           "ratio_over_T_to_3_8": ratio / handle.T ** 0.375,
           "argmax_x": best_x, "argmax_y": best_y}
    return ScanResult(sup_ratio=ratio, argmax=SurfacePoint(best_x, best_y), norm=norm, rows=[row])


def fourier_profile(handle: FormHandle, ys, norm: float, tol: float = 1e-10) -> np.ndarray:
    """l1 Fourier bound 2 sqrt(y) sum |a(n) b(T, 2 pi n y)| / ||phi|| at each height."""
    out = []
    for y in ys:
        N = truncation_length(handle.T, y, tol)
        _require(handle, N)
        out.append(np.sum(np.abs(_radial(handle, y, N))) / norm)
    return np.array(out)


def profile_slope(ys, vals) -> float:
    return float(np.polyfit(np.log(ys), np.log(vals), 1)[0])
