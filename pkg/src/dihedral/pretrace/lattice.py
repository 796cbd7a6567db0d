"""Hyperbolic lattice counts M(z, ell, delta, q) for integer matrices of determinant ell.

u(gamma z, z) = |c z^2 + (d - a) z - b|^2 / (ell y^2).  The fast path walks
over bottom rows (c, d): Y = Im(gamma z) = ell y / |cz + d|^2 must satisfy
(Y - y)^2 <= delta Y y, and the remaining freedom (a, b) + t (c, d)/g with
g = gcd(c, d) translates gamma z by t/g.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_CELLS = 10 ** 8
# u = delta ties (e.g. z = i, diag(2, 1), delta = 1/2) are counted by both enumerations
TIE = 1e-9


class EnumerationTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class LatticeQuery:
    z: complex
    ell: int
    delta: float
    q: int

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.ell < 1:
            raise ValueError("ell must be a positive integer")
        if not complex(self.z).imag > 0:
            raise ValueError("z must lie in the upper half-plane")


@dataclass
class MatrixBatch:
    """All matrices found, one row each; u is u(gamma z, z)."""
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    u: np.ndarray

    def __len__(self):
        return len(self.u)

    def classes(self, ell: int):
        par = (self.a + self.d) ** 2 == 4 * ell
        upper = (self.c == 0) & ~par
        generic = (self.c != 0) & ~par
        return generic, upper, par


def _height_ratios(delta: float):
    root = math.sqrt(delta + delta * delta / 4)
    return 1 + delta / 2 - root, 1 + delta / 2 + root


def _modinv(a: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Vectorised inverse of a modulo m (m >= 1, gcd(a, m) = 1)."""
    r0, r1 = a % m, m.copy()
    s0, s1 = np.ones_like(a), np.zeros_like(a)
    while np.any(r1 != 0):
        live = r1 != 0
        qt = np.where(live, r0 // np.where(live, r1, 1), 0)
        r0, r1 = np.where(live, r1, r0), np.where(live, r0 - qt * r1, r1)
        s0, s1 = np.where(live, s1, s0), np.where(live, s0 - qt * s1, s1)
    return s0 % m


def _estimate_cells(z: complex, ell: int, delta: float, q: int) -> float:
    rlo, _ = _height_ratios(delta)
    R = math.sqrt(ell / rlo)
    return (2 * R / (q * z.imag) + 1) * (2 * R + 1)


def enumerate_matrices(z: complex, ell: int, delta: float, q: int) -> MatrixBatch:
    """Every integer matrix of determinant ell with q | c and u(gamma z, z) <= delta."""
    z = complex(z)
    x, y = z.real, z.imag
    delta = delta * (1 + TIE)
    cells = _estimate_cells(z, ell, delta, q)
    if cells > MAX_CELLS:
        raise EnumerationTooLarge(f"about {cells:.3g} bottom rows for ell={ell}, delta={delta}")
    rlo, rhi = _height_ratios(delta)
    out = {k: [] for k in "abcdu"}

    def emit(a, b, c, d, u):
        for key, val in zip("abcdu", (a, b, c, d, u)):
            out[key].append(val)

    # c = 0: d | ell, a = ell / d, gamma z = (a z + b) / d
    for dd in range(1, ell + 1):
        if ell % dd:
            continue
        for d in (dd, -dd):
            a = ell // d
            Y = a * y / d
            rad2 = delta * Y * y - (Y - y) ** 2
            if rad2 < 0:
                continue
            rad = math.sqrt(rad2)
            lo, hi = sorted((d * (x - rad) - a * x, d * (x + rad) - a * x))
            b = np.arange(math.ceil(lo), math.floor(hi) + 1, dtype=np.int64)
            if not len(b):
                continue
            X = (a * x + b) / d
            u = ((X - x) ** 2 + (Y - y) ** 2) / (Y * y)
            keep = u <= delta
            n = int(keep.sum())
            emit(np.full(n, a), b[keep], np.zeros(n, np.int64), np.full(n, d), u[keep])

    c_max = int(math.sqrt(ell / rlo) / (q * y)) + 1
    for cm in range(1, c_max + 1):
        for c in (q * cm, -q * cm):
            R2 = ell / rlo - (c * y) ** 2
            if R2 < 0:
                continue
            R = math.sqrt(R2)
            d = np.arange(math.ceil(-c * x - R), math.floor(-c * x + R) + 1, dtype=np.int64)
            if not len(d):
                continue
            den2 = (c * x + d) ** 2 + (c * y) ** 2
            Y = ell * y / den2
            rad2 = delta * Y * y - (Y - y) ** 2
            g = np.gcd(c, d)
            ok = (rad2 >= 0) & (ell % g == 0)
            if not ok.any():
                continue
            d, Y, rad, g = d[ok], Y[ok], np.sqrt(rad2[ok]), g[ok]
            c1, d1 = c // g, d // g
            m = np.abs(c1)
            a0 = ((ell // g) % m) * _modinv(d1 % m, m) % m
            a0 = np.where(m == 1, 0, a0)
            b0 = (a0 * d - ell) // c
            X0 = ((a0 * x + b0) * (c * x + d) + a0 * c * y * y) / den2[ok]
            t_lo = np.ceil(g * (x - rad - X0)).astype(np.int64)
            t_hi = np.floor(g * (x + rad - X0)).astype(np.int64)
            cnt = np.maximum(t_hi - t_lo + 1, 0)
            if not cnt.any():
                continue
            idx = np.repeat(np.arange(len(d)), cnt)
            t = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt) + t_lo[idx]
            a = a0[idx] + t * c1[idx]
            b = b0[idx] + t * d1[idx]
            Xt = X0[idx] + t / g[idx]
            Yt = Y[idx]
            u = ((Xt - x) ** 2 + (Yt - y) ** 2) / (Yt * y)
            keep = u <= delta
            emit(a[keep], b[keep], np.full(int(keep.sum()), c), d[idx][keep], u[keep])
    cat = {k: (np.concatenate(v) if v else np.zeros(0)) for k, v in out.items()}
    return MatrixBatch(cat["a"].astype(np.int64), cat["b"].astype(np.int64),
                       cat["c"].astype(np.int64), cat["d"].astype(np.int64), cat["u"].astype(float))


def count_matrices(query: LatticeQuery) -> tuple[int, int, int, int]:
    """(M_star, M_upper, M_parabolic, total)."""
    batch = enumerate_matrices(query.z, query.ell, query.delta, query.q)
    gen, up, par = batch.classes(query.ell)
    return int(gen.sum()), int(up.sum()), int(par.sum()), len(batch)


def count_matrices_oracle(query: LatticeQuery) -> tuple[int, int, int, int]:
    """Second enumeration over (c, a + d, d - a, b) boxes, checking u exactly per matrix."""
    z = complex(query.z)
    x, y = z.real, z.imag
    ell, delta, q = query.ell, query.delta * (1 + TIE), query.q
    rlo, _ = _height_ratios(delta)
    c_max = int(math.sqrt(ell / rlo) / y) + 1
    s_max = int(2 * math.sqrt(ell * (1 + delta / 4))) + 1
    w = math.sqrt(delta * ell)
    gen = up = par = 0
    for c in range(-(c_max // q) * q, c_max + 1, q):
        for m in range(math.ceil(-2 * c * x - w), math.floor(-2 * c * x + w) + 1):
            re0 = c * (x * x - y * y) + m * x
            for b in range(math.ceil(re0 - w * y), math.floor(re0 + w * y) + 1):
                for s in range(-s_max, s_max + 1):
                    if (s - m) % 2:
                        continue
                    a, d = (s - m) // 2, (s + m) // 2
                    if a * d - b * c != ell:
                        continue
                    val = c * z * z + (d - a) * z - b
                    if abs(val) ** 2 / (ell * y * y) > delta:
                        continue
                    if (a + d) ** 2 == 4 * ell:
                        par += 1
                    elif c == 0:
                        up += 1
                    else:
                        gen += 1
    return gen, up, par, gen + up + par


def bound_rhs_generic(L: int, y: float, delta: float) -> float:
    return L / y + L ** 1.5 * delta ** 0.5 + L * L * delta


def bound_rhs_upper(L: int, y: float, delta: float) -> float:
    return L + L ** 3 * delta ** 0.5 * y


def bound_rhs_parabolic(ell: int, y: float, delta: float) -> float:
    return 1 + ell ** 0.5 * delta ** 0.5 * y + ell ** 0.75 * delta ** 0.375 * y ** -0.5


@dataclass
class BoundReport:
    z: complex
    L: int
    delta: float
    generic_sum: int
    upper_sum: int
    generic_ratio: float
    upper_ratio: float
    parabolic_nonsquare: int


def _primes(L: int):
    return [p for p in range(2, L + 1) if all(p % r for r in range(2, math.isqrt(p) + 1))]


def count_sums_vs_bounds(z: complex, L: int, delta: float, q: int) -> BoundReport:
    z = complex(z)
    gen_sum = 0
    bad_par = 0
    for ell in range(1, L + 1):
        g, u, p, _ = count_matrices(LatticeQuery(z, ell, delta, q))
        gen_sum += g
        if p and math.isqrt(ell) ** 2 != ell:
            bad_par += p
    up_sum = 0
    ps = _primes(L)
    cache = {}
    for p1 in ps:
        for p2 in ps:
            ell = p1 * p2
            if ell not in cache:
                cache[ell] = count_matrices(LatticeQuery(z, ell, delta, q))
            g, u, p, _ = cache[ell]
            up_sum += u
            if p and math.isqrt(ell) ** 2 != ell:
                bad_par += p
    y = z.imag
    return BoundReport(z=z, L=L, delta=delta, generic_sum=gen_sum, upper_sum=up_sum,
                       generic_ratio=gen_sum / bound_rhs_generic(L, y, delta),
                       upper_ratio=up_sum / bound_rhs_upper(L, y, delta),
                       parabolic_nonsquare=bad_par)
