"""Prime-supported amplifier x_n, the coefficients y_ell, and A_k(N), B_k(N)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from ..coeff import coeff_tables, primes_upto
from ..quadfield import FieldContext


def bump(r):
    """exp(1 - 1/(1 - (2r - 3)^2)) on (1, 2), zero elsewhere; peak value 1 at r = 3/2."""
    r = np.asarray(r, dtype=float)
    s = 2 * r - 3
    inside = np.abs(s) < 1
    out = np.zeros_like(r)
    out[inside] = np.exp(1 - 1 / (1 - s[inside] ** 2))
    return out


def mellin(w: Callable, s: float) -> float:
    val, _ = quad(lambda y: float(w(y)) * y ** (s - 1), 1.0, 2.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def w_tilde_one(w: Callable, panels: int = 64) -> float:
    """int_1^2 w(r) dr by composite Gauss-Legendre (second route to the Mellin value at s = 1)."""
    x, wt = np.polynomial.legendre.leggauss(20)
    edges = np.linspace(1.0, 2.0, panels + 1)
    h = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + h[:, None] * x).ravel()
    return float(np.sum(w(nodes) * (h[:, None] * wt).ravel()))


@dataclass
class AmplifierSpec:
    N: int
    k: int
    primes: np.ndarray
    x: dict                      # prime -> x_p
    y: dict = field(default_factory=dict)   # ell -> y_ell
    A: float = 0.0

    def x_vector(self, n_max: int) -> np.ndarray:
        v = np.zeros(n_max + 1)
        for p, val in self.x.items():
            if p <= n_max:
                v[p] = val
        return v


def build_amplifier(ctx: FieldContext, k: int, N: int, w: Callable = bump) -> AmplifierSpec:
    if N < 10:
        raise ValueError("amplifier length N must be >= 10")
    a = coeff_tables(ctx, (k,), 2 * N)[k].a
    ps = primes_upto(2 * N)
    ps = ps[ps >= N]
    x = {}
    for p in ps:
        val = float(w(p / N)) * math.log(p) * a[p]
        if val != 0.0:
            x[int(p)] = val
    # y_ell = sum_{d | (m, n), ell = mn/d^2} x_m x_n; on primes d > 1 only when m = n = p
    y = {}
    keys = sorted(x)
    y[1] = sum(v * v for v in x.values())
    for i, p in enumerate(keys):
        y[p * p] = y.get(p * p, 0.0) + x[p] ** 2
        for p2 in keys[i + 1:]:
            y[p * p2] = y.get(p * p2, 0.0) + 2 * x[p] * x[p2]
    A = float(sum(float(w(p / N)) * math.log(p) * a[p] ** 2 for p in ps))
    return AmplifierSpec(N=N, k=k, primes=ps, x=x, y=y, A=A)


def log_deriv_coeffs(ctx: FieldContext, k: int, n_max: int, a_2k: np.ndarray | None = None) -> np.ndarray:
    """b_k(n): Dirichlet coefficients of -L_k'/L_k with L_k = sum a_k(n)^2 n^{-s}."""
    if a_2k is None:
        a_2k = coeff_tables(ctx, (2 * k,), n_max)[2 * k].a
    b = np.zeros(n_max + 1)
    for p in primes_upto(n_max):
        p = int(p)
        lp = math.log(p)
        if p == ctx.q:
            pj = p
            while pj <= n_max:
                b[pj] = lp
                pj *= p
            continue
        chi = float(ctx.chi_mod_q[p % ctx.q])
        ap = a_2k[p]
        # Newton power sums of the Satake pair of phi_2k: P_j = ap P_{j-1} - chi P_{j-2}
        P_prev, P = 2.0, ap
        j, pj = 1, p
        while pj <= n_max:
            b[pj] = lp * (1 + chi ** j + P - (2 if j % 2 == 0 else 0))
            P_prev, P = P, ap * P - chi * P_prev
            j, pj = j + 1, pj * p
    return b


def B_of_N(b: np.ndarray, N: int, w: Callable = bump) -> float:
    n = np.arange(N, 2 * N + 1)
    n = n[n < len(b)]
    return float(np.sum(w(n / N) * b[n]))


@dataclass
class AmplifierCheck:
    N: list
    A: list
    B: list
    deviation: list            # |A/N - w~(1)|
    sqrtN_constant: float       # max |A - B| / sqrt(N)
    monotone: bool


def amplifier_asymptotic_check(ctx: FieldContext, k: int, N_list, w: Callable = bump) -> AmplifierCheck:
    N_list = sorted(N_list)
    n_max = 2 * N_list[-1]
    tabs = coeff_tables(ctx, (k, 2 * k), n_max)
    a = tabs[k].a
    b = log_deriv_coeffs(ctx, k, n_max, tabs[2 * k].a)
    wt = w_tilde_one(w)
    ps = primes_upto(n_max)
    As, Bs, dev = [], [], []
    for N in N_list:
        sel = ps[(ps >= N) & (ps <= 2 * N)]
        A = float(np.sum(w(sel / N) * np.log(sel) * a[sel] ** 2))
        B = B_of_N(b, N, w)
        As.append(A)
        Bs.append(B)
        dev.append(abs(A / N - wt))
    C = max(abs(A - B) / math.sqrt(N) for A, B, N in zip(As, Bs, N_list))
    mono = all(d2 < d1 for d1, d2 in zip(dev, dev[1:]))
    return AmplifierCheck(N=list(N_list), A=As, B=Bs, deviation=dev, sqrtN_constant=C, monotone=mono)
