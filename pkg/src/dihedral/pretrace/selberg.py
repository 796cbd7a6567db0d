"""Selberg transform chain h -> g -> Q -> k and the localising test kernel.

Point-pair invariant u(z, w) = |z - w|^2 / (Im z Im w), so u = 4 sinh^2(rho/2)
with rho the hyperbolic distance.  The chain is

    g(xi) = (1/2pi) int e^{-i r xi} h(r) dr,
    2 Q(v) = g(2 arcsinh sqrt(v)),
    k(u) = -(1/pi) int_{u/4}^inf (v - u/4)^{-1/2} dQ(v),

and in the distance variable the last line becomes
    k(rho) = -(1/2pi) int_rho^inf g'(xi) dxi / sqrt(sinh^2(xi/2) - sinh^2(rho/2)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline

_GX, _GW = leggauss(20)


class TransformError(ArithmeticError):
    pass


def _composite(a: float, b: float, panels: int):
    edges = np.linspace(a, b, panels + 1)
    h = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + h[:, None] * _GX).ravel(), (h[:, None] * _GW).ravel()


def u_of_rho(rho):
    return 4 * np.sinh(np.asarray(rho) / 2) ** 2


def rho_of_u(u):
    return 2 * np.arcsinh(np.sqrt(np.asarray(u)) / 2)


@dataclass
class TransformPair:
    h: Callable
    g: Callable
    g_prime: Callable
    T: float
    rho: np.ndarray = field(repr=False)
    k_values: np.ndarray = field(repr=False)
    _spline: CubicSpline = field(repr=False, default=None)

    def __post_init__(self):
        self._spline = CubicSpline(self.rho, self.k_values)

    @property
    def k0(self) -> float:
        return float(self.k_values[0])

    def kernel_rho(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = self._spline(np.minimum(rho, self.rho[-1]))
        return np.where(rho > self.rho[-1], 0.0, out)

    def kernel_k(self, u):
        return self.kernel_rho(rho_of_u(u))

    def support(self, rel: float = 1e-12) -> float:
        """Largest u with |k(u)| >= rel * |k(0)| on the tabulation grid."""
        big = np.nonzero(np.abs(self.k_values) >= rel * abs(self.k0))[0]
        return float(u_of_rho(self.rho[min(big[-1] + 1, len(self.rho) - 1)]))


def selberg_chain(h: Callable, T_support: float, xi_max: float = 12.0,
                  freq: float | None = None) -> TransformPair:
    """Tabulate g, g' and k for an even multiplier h negligible beyond r = T_support.

    freq is the dominant oscillation frequency of g (defaults to T_support) and
    sets the grid densities.
    """
    freq = max(float(freq if freq is not None else T_support), 1.0)
    r, wr = _composite(0.0, T_support, max(8, int(4 * T_support)))
    hr = np.asarray(h(r), dtype=float)
    # g and g' on a dense xi grid, then splines
    n_xi = int(xi_max * freq * 40) + 2000
    xi = np.linspace(0.0, xi_max, n_xi)
    g_tab = np.empty(n_xi)
    gp_tab = np.empty(n_xi)
    for s in range(0, n_xi, 2000):
        arg = np.outer(xi[s:s + 2000], r)
        g_tab[s:s + 2000] = np.cos(arg) @ (wr * hr) / math.pi
        gp_tab[s:s + 2000] = -np.sin(arg) @ (wr * hr * r) / math.pi
    scale = np.max(np.abs(gp_tab))
    tail = np.max(np.abs(gp_tab[int(0.95 * n_xi):]))
    if tail > 1e-12 * scale:
        raise TransformError(f"g'(xi) not negligible at xi_max={xi_max}: {tail / scale:.2e}")
    g = CubicSpline(xi, g_tab)
    gp = CubicSpline(xi, gp_tab)

    # k on a distance grid resolving the oscillation 2 pi / freq
    n_rho = int(xi_max * freq * 6) + 400
    rho = np.linspace(0.0, xi_max, n_rho)
    k_vals = np.empty(n_rho)
    for i, rh in enumerate(rho):
        tmax = math.sqrt(xi_max - rh)
        if tmax < 1e-12:
            k_vals[i] = 0.0
            continue
        panels = max(4, int(freq * tmax * tmax / 2) + 4)
        t, wt = _composite(0.0, tmax, panels)
        half = 0.5 * t * t
        den = np.sqrt(np.sinh(half) * np.sinh(rh + half))
        k_vals[i] = -np.sum(wt * gp(rh + t * t) * t / den) / math.pi
    if not np.all(np.isfinite(k_vals)):
        bad = int(np.argmax(~np.isfinite(k_vals)))
        raise TransformError(f"kernel quadrature failed at u={u_of_rho(rho[bad]):.4g}")
    return TransformPair(h=h, g=g, g_prime=gp, T=T_support, rho=rho, k_values=k_vals)


def gaussian_h(width: float = 1.0):
    return lambda r: np.exp(-(np.asarray(r) / width) ** 2)


def h_test(T: float):
    """e^{-(r-T)^2} + e^{-(r+T)^2} + 4 e^{-r^2 - T^2}.

    The last term keeps h positive on the segment r in i[0, 1/2], where the
    first two sum to 2 e^{t^2 - T^2} cos(2tT) at r = it.
    """
    def h(r):
        r = np.asarray(r, dtype=complex if np.iscomplexobj(r) else float)
        return np.exp(-(r - T) ** 2) + np.exp(-(r + T) ** 2) + 4 * np.exp(-r * r - T * T)
    return h


def test_kernel(T: float, xi_max: float = 12.0) -> TransformPair:
    if T < 1:
        raise ValueError("test kernel needs T >= 1")
    return selberg_chain(h_test(T), T + 9.0, xi_max=xi_max, freq=T + 1.0)


@dataclass
class KernelShape:
    T: float
    h_at_T: float
    min_h_sampled: float
    k0_over_T: float
    sup_scaled_iv: float       # sup over u in [T^-2, 1] of |k| u^{1/4} / T^{1/2}
    flagged: bool


def kernel_shape(pair: TransformPair, expected: float = 1.0) -> KernelShape:
    T = pair.T - 9.0
    r = np.linspace(0, 2 * T, 2001)
    it = 1j * np.linspace(0, 0.5, 101)
    hmin = min(float(np.min(pair.h(r).real)), float(np.min(pair.h(it).real)))
    u = np.exp(np.linspace(math.log(T ** -2), 0.0, 2000))
    iv = float(np.max(np.abs(pair.kernel_k(u)) * u ** 0.25) / math.sqrt(T))
    k0T = abs(pair.k0) / T
    return KernelShape(T=T, h_at_T=float(pair.h(T)), min_h_sampled=hmin, k0_over_T=k0T,
                       sup_scaled_iv=iv, flagged=max(k0T, iv) > 10 * expected)


def spherical_transform(pair: TransformPair, r, xi_max: float | None = None) -> np.ndarray:
    """Forward chain k -> Q -> g -> h, independent of the tabulated g.

    Q(v) = int_v^inf k(4w)(w - v)^{-1/2} dw,  g(xi) = 2 Q(sinh^2(xi/2)),
    h(r) = 2 int_0^inf cos(r xi) g(xi) dxi.
    With w = sinh^2(eta/2) and eta = xi + t^2 the Abel integral is regular.
    """
    xi_max = xi_max or float(pair.rho[-1])
    freq = max(pair.T, 1.0)
    xi, wxi = _composite(0.0, xi_max, int(xi_max * freq) + 40)
    g = np.empty_like(xi)
    for i, x in enumerate(xi):
        tmax = math.sqrt(xi_max - x)
        t, wt = _composite(0.0, tmax, max(4, int(freq * tmax * tmax / 2) + 4))
        eta = x + t * t
        den = np.sqrt(np.sinh(0.5 * t * t) * np.sinh(x + 0.5 * t * t))
        g[i] = 2 * np.sum(wt * pair.kernel_rho(eta) * np.sinh(eta) * t / den)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    return 2 * np.cos(np.outer(r, xi)) @ (wxi * g)
