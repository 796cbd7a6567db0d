"""Hecke L-functions L(s, phi_k) = sum a_k(n) n^{-s}: series, Euler product,
gamma factor, approximate functional equation and second moments."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import loggamma

from .coeff import coeff_tables, hecke_coeffs, primes_upto, spectral_parameter
from .quadfield import FieldContext, ideal_table


class RootNumberError(ArithmeticError):
    pass


# -- series and Euler product ----------------------------------------------------

def dirichlet_partial(ctx: FieldContext, k: int, s: complex, X: int, a: np.ndarray | None = None) -> complex:
    if X < 1:
        raise ValueError("X must be >= 1")
    if a is None:
        a = hecke_coeffs(ctx, k, X).a
    n = np.arange(1, X + 1)
    return complex(np.sum(a[1:X + 1] * np.exp(-s * np.log(n))))


def euler_partial(ctx: FieldContext, k: int, s: complex, P: int, a: np.ndarray | None = None) -> complex:
    """prod_{p <= P} (1 - a(p) p^-s + chi(p) p^-2s)^-1; the ramified factor is (1 - a(q) q^-s)^-1."""
    if a is None:
        a = hecke_coeffs(ctx, k, P).a
    out = 1.0 + 0j
    for p in primes_upto(P):
        p = int(p)
        x = p ** (-s)
        chi = ctx.chi_mod_q[p % ctx.q]
        out /= 1 - a[p] * x + chi * x * x
    return out


# -- gamma factor ----------------------------------------------------------------

def gamma_factor(q: int, T: float, s: complex) -> complex:
    """log L_inf(s) = s log(sqrt(q)/pi) + log Gamma((s + iT)/2) + log Gamma((s - iT)/2)."""
    s = complex(s)
    for w in ((s + 1j * T) / 2, (s - 1j * T) / 2):
        if w.real <= 0.5 and abs(w - round(w.real)) < 1e-8 and round(w.real) <= 0:
            raise ValueError(f"s={s} is within 1e-8 of a pole of the gamma factor")
    return complex(s * math.log(math.sqrt(q) / math.pi)
                   + loggamma((s + 1j * T) / 2) + loggamma((s - 1j * T) / 2))


_BERNOULLI = [1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510]


def loggamma_stirling(z: complex, shift: int = 12) -> complex:
    """log Gamma by the Stirling series after shifting Re z above `shift`."""
    z = complex(z)
    acc = 0j
    while z.real < shift:
        acc -= cmath.log(z)
        z += 1
    series = sum(b / ((2 * j + 1) * (2 * j + 2) * z ** (2 * j + 1)) for j, b in enumerate(_BERNOULLI))
    val = (z - 0.5) * cmath.log(z) - z + 0.5 * math.log(2 * math.pi) + series + acc
    # principal branch: match the imaginary part continuously with scipy's loggamma
    return val


def gamma_factor_stirling(q: int, T: float, s: complex) -> complex:
    s = complex(s)
    return s * math.log(math.sqrt(q) / math.pi) + loggamma_stirling((s + 1j * T) / 2) \
        + loggamma_stirling((s - 1j * T) / 2)


# -- approximate functional equation -----------------------------------------------

@dataclass(frozen=True)
class AFEConfig:
    sigma: float = 1.0          # contour Re(u) for V; no poles between 0 and sigma
    step: float = 0.05          # trapezoid step in Im(u)
    tau_min: float = 8.0        # truncate |Im u| at max(tau_min, log^2 T)
    smoothing: float = 1.0      # G(u) = exp(smoothing * u^2)
    v_cut: float = 1e-8         # stop the series once sqrt(n) |V(n)| falls below this
    length_factor: float = 1.0  # multiply the series length (doubling test)


def _v_table(q: int, T: float, t: float, cfg: AFEConfig):
    """Spline of V_t(y) in log y, V_t(y) = (1/2 pi i) int L(1/2+it+u)/L(1/2+it) y^-u G(u) du/u."""
    tau_max = max(cfg.tau_min, math.log(max(T, 3.0)) ** 2)
    tau = np.arange(-tau_max, tau_max + cfg.step / 2, cfg.step)
    u = cfg.sigma + 1j * tau
    s0 = 0.5 + 1j * t
    log_ratio = (u * math.log(math.sqrt(q) / math.pi)
                 + loggamma((s0 + u + 1j * T) / 2) + loggamma((s0 + u - 1j * T) / 2)
                 - loggamma((s0 + 1j * T) / 2) - loggamma((s0 - 1j * T) / 2))
    weight = np.exp(log_ratio + cfg.smoothing * u * u) / u * cfg.step / (2 * math.pi)
    # natural scale of the cutoff: y0 = sqrt(q) sqrt(T^2 - t^2) / (2 pi)
    y0 = math.sqrt(q) * math.sqrt(max(T * T - t * t, 1.0)) / (2 * math.pi)
    width = 2 * math.sqrt(cfg.smoothing * math.log(1 / cfg.v_cut) + 4)
    ly = np.linspace(-6.0, math.log(y0) + width + 2, 1200)
    ly = ly[ly >= -6.0]
    V = np.exp(-np.outer(ly, u)) @ weight
    mag = np.abs(V) * np.exp(ly / 2)
    beyond = np.nonzero((mag < cfg.v_cut) & (ly > math.log(y0)))[0]
    if not len(beyond):
        raise ArithmeticError("V_t(y) did not decay within the tabulated range")
    y_end = math.exp(ly[beyond[0]]) * cfg.length_factor
    return CubicSpline(ly, V.real), CubicSpline(ly, V.imag), y_end


class SeriesCache:
    """Caches a(n) n^{-1/2 - it} and log n per t so that configs share the work."""

    def __init__(self, a: np.ndarray):
        self.a = a
        self._ln = None
        self._base = {}

    @property
    def ln(self):
        if self._ln is None:
            self._ln = np.log(np.arange(1, len(self.a)))
        return self._ln

    def base(self, t: float) -> np.ndarray:
        if t not in self._base:
            self._base[t] = self.a[1:] * np.exp(-(0.5 + 1j * t) * self.ln)
        return self._base[t]

    def smoothed(self, t: float, vr, vi, y_end: float) -> complex:
        N = min(int(y_end) + 1, len(self.a) - 1)
        ln = self.ln[:N]
        return complex(np.dot(self.base(t)[:N], vr(ln) + 1j * vi(ln)))


def afe_length(ctx: FieldContext, k: int, t: float = 0.0, cfg: AFEConfig | None = None) -> int:
    cfg = cfg or AFEConfig()
    T = spectral_parameter(ctx, k)
    return int(max(_v_table(ctx.q, T, t, cfg)[2], _v_table(ctx.q, T, -t, cfg)[2])) + 1


@dataclass
class AFEParts:
    first: complex
    second: complex
    ratio: complex          # L_inf(1/2 - it) / L_inf(1/2 + it)


def _as_cache(a) -> SeriesCache:
    return a if isinstance(a, SeriesCache) else SeriesCache(np.asarray(a))


def afe_parts(ctx: FieldContext, k: int, t: float, a, cfg: AFEConfig) -> AFEParts:
    cache = _as_cache(a)
    T = spectral_parameter(ctx, k)
    vr, vi, ye = _v_table(ctx.q, T, t, cfg)
    wr, wi, ye2 = _v_table(ctx.q, T, -t, cfg)
    need = int(max(ye, ye2)) + 1
    if len(cache.a) - 1 < need:
        raise ValueError(f"AFE needs coefficients up to {need}, have {len(cache.a) - 1}")
    s1 = cache.smoothed(t, vr, vi, ye)
    s2 = cache.smoothed(-t, wr, wi, ye2)
    ratio = cmath.exp(gamma_factor(ctx.q, T, 0.5 - 1j * t) - gamma_factor(ctx.q, T, 0.5 + 1j * t))
    return AFEParts(s1, s2, ratio)


ROOT_PROBE_T = 0.7
ROOT_SMOOTHINGS = (0.5, 1.0)


def root_number_length(ctx: FieldContext, k: int, cfg: AFEConfig | None = None) -> int:
    cfg = cfg or AFEConfig()
    c = AFEConfig(cfg.sigma, cfg.step, cfg.tau_min, max(ROOT_SMOOTHINGS), cfg.v_cut, 2.0)
    return afe_length(ctx, k, ROOT_PROBE_T, c)


def root_number(ctx: FieldContext, k: int, a=None, cfg: AFEConfig | None = None) -> int:
    """Solve L = S1 + w r S2 for w from two smoothings at t = ROOT_PROBE_T.

    At t = 0 both sums coincide and the system degenerates, so the probe sits
    off the centre.  The estimate must be within 1e-3 of +-1, with the same sign
    after doubling the series length.
    """
    cfg = cfg or AFEConfig()
    if a is None:
        a = hecke_coeffs(ctx, k, root_number_length(ctx, k, cfg)).a
    cache = _as_cache(a)
    t = ROOT_PROBE_T
    signs = []
    for lf in (1.0, 2.0):
        c1, c2 = (AFEConfig(cfg.sigma, cfg.step, cfg.tau_min, sm, cfg.v_cut, lf) for sm in ROOT_SMOOTHINGS)
        p1 = afe_parts(ctx, k, t, cache, c1)
        p2 = afe_parts(ctx, k, t, cache, c2)
        den = p1.ratio * (p1.second - p2.second)
        if abs(den) < 1e-8:
            raise RootNumberError(f"k={k}: degenerate root-number system at t={t}")
        w = (p2.first - p1.first) / den
        if abs(w - round(w.real)) > 1e-3 or abs(round(w.real)) != 1:
            raise RootNumberError(f"k={k}: root number estimate {w:.6g} is not close to +-1")
        signs.append(int(round(w.real)))
    if signs[0] != signs[1]:
        raise RootNumberError(f"k={k}: root number flips under doubling {signs}")
    return signs[0]


def afe_lvalue(ctx: FieldContext, k: int, t: float = 0.0, a=None,
               cfg: AFEConfig | None = None, sign: int | None = None) -> complex:
    cfg = cfg or AFEConfig()
    if a is None:
        n = max(afe_length(ctx, k, t, cfg), root_number_length(ctx, k, cfg) if sign is None else 0)
        a = hecke_coeffs(ctx, k, n).a
    cache = _as_cache(a)
    if sign is None:
        sign = root_number(ctx, k, cache, cfg)
    p = afe_parts(ctx, k, t, cache, cfg)
    return p.first + sign * p.ratio * p.second


# -- second moment -----------------------------------------------------------------

@dataclass
class MomentResult:
    K: int
    t: float
    average: float
    values: dict = field(default_factory=dict)
    signs: dict = field(default_factory=dict)


def second_moment(ctx: FieldContext, K: int, t: float = 0.0, cfg: AFEConfig | None = None) -> MomentResult:
    """(1/K) sum_{K < k <= 2K} |L(1/2 + it, phi_k)|^2."""
    cfg = cfg or AFEConfig()
    ks = range(K + 1, 2 * K + 1)
    need = max(afe_length(ctx, 2 * K, t, cfg), root_number_length(ctx, 2 * K, cfg))
    table = ideal_table(ctx, need)
    vals, signs = {}, {}
    for k in ks:
        cache = SeriesCache(hecke_coeffs(ctx, k, need, table).a)
        try:
            sign = root_number(ctx, k, cache, cfg)
            vals[k] = abs(afe_lvalue(ctx, k, t, cache, cfg, sign)) ** 2
        except ArithmeticError as exc:
            raise ArithmeticError(f"second moment failed at k={k}: {exc}") from exc
        signs[k] = sign
    return MomentResult(K=K, t=t, average=sum(vals.values()) / K, values=vals, signs=signs)
