"""Grossencharacter values and Hecke coefficients a_k(n) of the dihedral forms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quadfield import FieldContext, IdealRep, IdealTable, chi_array, ideal_table

IMAG_TOL = 1e-12


def spectral_parameter(ctx: FieldContext, k: int) -> float:
    return math.pi * k / ctx.log_eps


@dataclass(frozen=True)
class CoeffTable:
    """a[n] = a_k(n) for 0 <= n <= N; a[0] is padding and always 0."""
    k: int
    T: float
    N: int
    a: np.ndarray = field(repr=False)

    def __getitem__(self, n):
        return self.a[n]


def grossenchar(ctx: FieldContext, k: int, ideal: IdealRep) -> complex:
    if k < 1:
        raise ValueError("character index must be >= 1")
    return complex(np.exp(1j * math.pi * k * ideal.angle / ctx.log_eps))


def character_values(ctx: FieldContext, k: int, table: IdealTable) -> np.ndarray:
    return np.exp(1j * math.pi * k * table.angle / ctx.log_eps)


def hecke_coeffs(ctx: FieldContext, k: int, N: int, table: IdealTable | None = None) -> CoeffTable:
    if k < 1 or N < 1:
        raise ValueError("need k >= 1 and N >= 1")
    if table is None:
        table = ideal_table(ctx, N)
    sel = table.norm <= N
    phase = math.pi * k * table.angle[sel] / ctx.log_eps
    re = np.bincount(table.norm[sel], weights=np.cos(phase), minlength=N + 1)
    im = np.bincount(table.norm[sel], weights=np.sin(phase), minlength=N + 1)
    worst = float(np.max(np.abs(im))) if len(im) else 0.0
    if worst > IMAG_TOL:
        raise ArithmeticError(f"a_{k}(n) has imaginary part {worst:.3e}; conjugate ideals are missing")
    re[0] = 0.0
    return CoeffTable(k=k, T=spectral_parameter(ctx, k), N=N, a=re)


def coeff_tables(ctx: FieldContext, ks, N: int) -> dict[int, CoeffTable]:
    table = ideal_table(ctx, N)
    return {k: hecke_coeffs(ctx, k, N, table) for k in ks}


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.nonzero(sieve)[0]


@dataclass
class HeckeReport:
    max_deviation: float
    checked_pairs: int
    checked_powers: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_hecke_relations(table: CoeffTable, ctx: FieldContext, tol: float = 1e-10) -> HeckeReport:
    """Multiplicativity on coprime pairs and the prime-power recursion."""
    a = table.a
    N = table.N
    chi = chi_array(ctx, N)
    worst = 0.0
    pairs = 0
    failures = []
    for m in range(2, math.isqrt(N) + 1):
        n = np.arange(m + 1, N // m + 1)
        n = n[np.gcd(n, m) == 1]
        if not len(n):
            continue
        dev = np.abs(a[m * n] - a[m] * a[n])
        pairs += len(n)
        i = int(np.argmax(dev))
        worst = max(worst, float(dev[i]))
        if dev[i] > tol:
            failures.append(("mult", m, int(n[i]), float(dev[i])))
    powers = 0
    for p in primes_upto(N):
        p = int(p)
        prev, cur = 1.0, a[p]
        pj = p
        while pj * p <= N:
            nxt = a[pj * p]
            dev = abs(nxt - (a[p] * cur - chi[p] * prev))
            powers += 1
            worst = max(worst, dev)
            if dev > tol:
                failures.append(("power", p, pj * p, dev))
            prev, cur = cur, nxt
            pj *= p
    return HeckeReport(max_deviation=worst, checked_pairs=pairs, checked_powers=powers,
                       failures=failures)


def sym_square_prime_identity(ctx: FieldContext, k: int, p: int,
                              tables: dict[int, CoeffTable] | None = None) -> tuple[float, float]:
    """(a_k(p)^2, 1 + chi(p) + a_2k(p)); both sides agree for p != q."""
    if p == ctx.q:
        raise ValueError("the local factor at the ramified prime is (1 + q^-s), not covered")
    if tables is None or k not in tables or 2 * k not in tables or tables[k].N < p:
        tables = coeff_tables(ctx, (k, 2 * k), p)
    ak = tables[k].a[p]
    a2k = tables[2 * k].a[p]
    return float(ak * ak), float(1 + ctx.chi_mod_q[p % ctx.q] + a2k)


# -- Dirichlet series helpers -------------------------------------------------

def dirichlet_convolve(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """(f * g)(n) = sum_{d | n} f(d) g(n/d); arrays indexed from 0, entry 0 ignored."""
    X = min(len(f), len(g)) - 1
    out = np.zeros(X + 1, dtype=np.result_type(f, g))
    for d in range(1, X + 1):
        if f[d] != 0:
            out[d::d] += f[d] * g[1:X // d + 1]
    return out


def mobius(n_max: int) -> np.ndarray:
    mu = np.ones(n_max + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_upto(n_max):
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
    return mu


def rankin_selberg_coeffs(ctx: FieldContext, a2k: np.ndarray, X: int) -> np.ndarray:
    """Coefficients of zeta(s)L(s,chi)L(s,phi_2k) / ((1 + q^-s) zeta(2s)) up to X."""
    one = np.ones(X + 1)
    one[0] = 0
    chi = chi_array(ctx, X).astype(float)
    chi[0] = 0
    num = dirichlet_convolve(dirichlet_convolve(one, chi), a2k[:X + 1])
    # 1/zeta(2s): mu(m) at n = m^2;  1/(1 + q^-s): (-1)^j at n = q^j
    inv = np.zeros(X + 1)
    mu = mobius(math.isqrt(X))
    for r in range(1, math.isqrt(X) + 1):
        inv[r * r] = mu[r]
    inv_q = np.zeros(X + 1)
    j, qj = 0, 1
    while qj <= X:
        inv_q[qj] = (-1) ** j
        j, qj = j + 1, qj * ctx.q
    return dirichlet_convolve(dirichlet_convolve(num, inv), inv_q)
