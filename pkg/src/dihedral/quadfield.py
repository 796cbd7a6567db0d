"""Arithmetic in the real quadratic field Q(sqrt(q)), q prime and q = 1 mod 4.

Elements of the ring of integers Z[omega], omega = (1 + sqrt(q))/2, are stored
as integer pairs (a, b) meaning a + b*omega.  With m = (q - 1)/4 we have
omega**2 = omega + m, conj(omega) = 1 - omega and N(a + b*omega) = a*a + a*b - m*b*b.

Every ideal of norm <= N is listed once through its canonical generator: the
unique generator alpha > 0 whose angle log|alpha/conj(alpha)| lies in the
half-open interval (-log eps, log eps].  Membership of the interval is decided
with exact integer sign tests, so ideals sitting on the boundary are never
duplicated or lost.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

log = logging.getLogger(__name__)

PAPER_LEVELS = (13, 17, 29, 37, 41, 53)
MAX_NORM = 10**8


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def legendre(n: int, p: int) -> int:
    n %= p
    if n == 0:
        return 0
    return 1 if pow(n, (p - 1) // 2, p) == 1 else -1


@dataclass(frozen=True)
class FieldContext:
    q: int
    eps: tuple[int, int]
    m: int
    sqrt_q: float
    omega: float
    log_eps: float
    chi_mod_q: tuple[int, ...]

    @property
    def eps_real(self) -> float:
        return real_embedding(self, *self.eps)


@dataclass(frozen=True)
class IdealRep:
    gen: tuple[int, int]
    norm: int
    angle: float
    cls: str
    primitive: bool


# -- element arithmetic -------------------------------------------------------

def mul(ctx: FieldContext, x: tuple[int, int], y: tuple[int, int]) -> tuple[int, int]:
    a, b = x
    c, d = y
    return a * c + ctx.m * b * d, a * d + b * c + b * d


def conj(x: tuple[int, int]) -> tuple[int, int]:
    a, b = x
    return a + b, -b


def norm(ctx: FieldContext, a: int, b: int) -> int:
    return a * a + a * b - ctx.m * b * b


def real_embedding(ctx: FieldContext, a, b):
    """a + b*omega in floating point, avoiding cancellation between the parts."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    u = 2 * a + b
    v = b * ctx.sqrt_q
    same = u * v >= 0
    # (u + v)/2 is cancellation-free when u and v share a sign; otherwise use
    # the norm identity (u + v)(u - v) = 4N.
    nrm = a * a + a * b - ctx.m * b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        alt = np.where(u - v != 0, 2 * nrm / (u - v), 0.0)
    out = np.where(same, (u + v) / 2, alt)
    return out if out.ndim else float(out)


def _sign_sqrt(u, v, q):
    """Exact sign of u + v*sqrt(q) for integer arrays u, v."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    su = np.sign(u)
    sv = np.sign(v)
    mixed = su * sv < 0
    # when signs differ, compare u^2 with q v^2
    cmp = np.sign(u * u - q * v * v)
    return np.where(mixed, su * cmp, np.where(su != 0, su, sv))


def _sign_elt(ctx: FieldContext, a, b):
    """Exact sign of the real number a + b*omega."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    return _sign_sqrt(2 * a + b, b, ctx.q)


def angle_of(ctx: FieldContext, a, b):
    """log|alpha/conj(alpha)| computed as 2 log|alpha| - log|N(alpha)|."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    u = 2 * a + b
    v = b * ctx.sqrt_q
    n = np.abs(a * a + a * b - ctx.m * b * b)
    stable_alpha = u * v >= 0
    la = np.log(np.abs(np.where(stable_alpha, (u + v) / 2, 1.0)))
    lc = np.log(np.abs(np.where(stable_alpha, 1.0, (u - v) / 2)))
    t = np.where(stable_alpha, 2 * la - np.log(n), np.log(n) - 2 * lc)
    return t if t.ndim else float(t)


# -- field construction -------------------------------------------------------

def _cf_fundamental_unit(q: int, m: int) -> tuple[int, int]:
    """Fundamental unit from the continued fraction of omega.

    Expands omega = (P + sqrt(q))/Q exactly and tests each convergent h/k for
    N(h - k*omega) = +-1; the first hit gives eps = (h - k) + k*omega.
    """
    r = math.isqrt(q)
    P, Q = 1, 2
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    for _ in range(10000):
        a = (P + r) // Q
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        nrm = h * h - h * k - m * k * k
        if abs(nrm) == 1:
            return h - k, k
        P = a * Q - P
        Q = (q - P * P) // Q
    raise FieldError(f"continued fraction of omega_{q} did not produce a unit")


def pell_unit(q: int, bmax: int = 1000) -> tuple[int, int] | None:
    """Brute-force smallest unit a + b*omega > 1 with 1 <= b <= bmax."""
    m = (q - 1) // 4
    sq = math.sqrt(q)
    for b in range(1, bmax + 1):
        # a + b*conj(omega) must be tiny, so a is near b*(sqrt(q) - 1)/2
        a0 = round(b * (sq - 1) / 2)
        for a in (a0 - 1, a0, a0 + 1):
            if abs(a * a + a * b - m * b * b) == 1 and a + b * (1 + sq) / 2 > 1:
                return a, b
    return None


def make_field_context(q: int) -> FieldContext:
    errors = []
    if q <= 8:
        errors.append(f"q={q} must exceed 8")
    if q % 4 != 1:
        errors.append(f"q={q} must satisfy q = 1 mod 4")
    if not is_prime(q):
        errors.append(f"q={q} must be prime")
    if errors:
        raise FieldError("; ".join(errors))
    m = (q - 1) // 4
    eps = _cf_fundamental_unit(q, m)
    if eps[0] ** 2 + eps[0] * eps[1] - m * eps[1] ** 2 != -1:
        raise FieldError(f"fundamental unit of Q(sqrt({q})) has norm +1")
    sq = math.sqrt(q)
    omega = (1 + sq) / 2
    chi = tuple(legendre(r, q) for r in range(q))
    ctx = FieldContext(q=q, eps=eps, m=m, sqrt_q=sq, omega=omega,
                       log_eps=0.0, chi_mod_q=chi)
    log_eps = math.log(real_embedding(ctx, *eps))
    ctx = FieldContext(q=q, eps=eps, m=m, sqrt_q=sq, omega=omega,
                       log_eps=log_eps, chi_mod_q=chi)
    if q not in PAPER_LEVELS:
        # class number one is assumed, but a cheap count catches the failure
        _check_principal_counts(ctx, 200)
        log.warning("q=%d is outside the tested list; narrow class number 1 is assumed", q)
    return ctx


def _check_principal_counts(ctx: FieldContext, n_max: int) -> None:
    table = ideal_table(ctx, n_max)
    got = np.bincount(table.norm, minlength=n_max + 1)
    want = ideal_count_oracle(ctx, n_max)
    if not np.array_equal(got, want):
        raise FieldError(f"Q(sqrt({ctx.q})) has non-principal ideals (class number > 1)")


# -- characters ---------------------------------------------------------------

def kronecker_chi(ctx: FieldContext, n: int) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    return ctx.chi_mod_q[n % ctx.q]


def chi_array(ctx: FieldContext, n_max: int) -> np.ndarray:
    """chi_q(n) for n = 0..n_max (index 0 holds chi(0) = 0)."""
    lut = np.array(ctx.chi_mod_q, dtype=np.int64)
    return lut[np.arange(n_max + 1) % ctx.q]


def ideal_count_oracle(ctx: FieldContext, n_max: int) -> np.ndarray:
    """Number of ideals of norm n, as sum_{d | n} chi(d), for n = 0..n_max."""
    chi = chi_array(ctx, n_max)
    out = np.zeros(n_max + 1, dtype=np.int64)
    for d in range(1, n_max + 1):
        if chi[d]:
            out[d::d] += chi[d]
    return out


# -- ideals -------------------------------------------------------------------

@dataclass(frozen=True)
class IdealTable:
    """Column store of canonical generators, sorted by (norm, angle)."""
    a: np.ndarray
    b: np.ndarray
    norm: np.ndarray
    angle: np.ndarray
    positive: np.ndarray  # True for class A1 (N(alpha) > 0)
    primitive: np.ndarray

    def __len__(self) -> int:
        return len(self.a)

    def rows(self) -> Iterator[IdealRep]:
        for i in range(len(self.a)):
            yield IdealRep(gen=(int(self.a[i]), int(self.b[i])), norm=int(self.norm[i]),
                           angle=float(self.angle[i]),
                           cls="A1" if self.positive[i] else "A2",
                           primitive=bool(self.primitive[i]))


def _in_window(ctx: FieldContext, a, b, s):
    """Exact test of -log eps < t_alpha <= log eps for alpha = a + b*omega > 0.

    s is the sign of conj(alpha); with |conj(alpha)| = s*conj(alpha) the window
    reads alpha <= eps*s*conj(alpha) and eps*alpha > s*conj(alpha).
    """
    ea, eb = ctx.eps
    m = ctx.m
    ca, cb = a + b, -b
    # eps * conj(alpha)
    pa = ea * ca + m * eb * cb
    pb = ea * cb + eb * ca + eb * cb
    upper = _sign_elt(ctx, s * pa - a, s * pb - b) >= 0
    # eps * alpha
    qa = ea * a + m * eb * b
    qb = ea * b + eb * a + eb * b
    lower = _sign_elt(ctx, qa - s * ca, qb - s * cb) > 0
    return upper & lower


def ideal_table(ctx: FieldContext, n_max: int) -> IdealTable:
    if n_max > MAX_NORM:
        raise FieldError(f"norm bound {n_max} exceeds supported {MAX_NORM}")
    empty = np.zeros(0, dtype=np.int64)
    if n_max < 1:
        return IdealTable(empty, empty, empty, np.zeros(0), empty.astype(bool), empty.astype(bool))
    eps_r = ctx.eps_real
    bound = math.sqrt(n_max * eps_r) * (1 + 1e-9) + 1e-9
    bmax = int(math.floor(2 * bound / ctx.sqrt_q)) + 1
    cols = {k: [] for k in ("a", "b", "n", "s")}
    for b in range(-bmax, bmax + 1):
        # 0 < a + b*omega <= bound
        lo = math.floor(-b * ctx.omega) - 1
        hi = math.ceil(bound - b * ctx.omega) + 1
        a = np.arange(lo, hi + 1, dtype=np.int64)
        bb = np.full_like(a, b)
        nrm = a * a + a * bb - ctx.m * bb * bb
        keep = (nrm != 0) & (np.abs(nrm) <= n_max) & (_sign_elt(ctx, a, bb) > 0)
        a, bb, nrm = a[keep], bb[keep], nrm[keep]
        if not len(a):
            continue
        s = np.sign(nrm)
        ok = _in_window(ctx, a, bb, s)
        cols["a"].append(a[ok])
        cols["b"].append(bb[ok])
        cols["n"].append(np.abs(nrm[ok]))
        cols["s"].append(s[ok])
    a = np.concatenate(cols["a"])
    b = np.concatenate(cols["b"])
    n = np.concatenate(cols["n"])
    s = np.concatenate(cols["s"])
    t = angle_of(ctx, a, b)
    order = np.lexsort((t, n))
    a, b, n, s, t = a[order], b[order], n[order], s[order], t[order]
    prim = np.gcd(a, b) == 1
    return IdealTable(a=a, b=b, norm=n, angle=t, positive=s > 0, primitive=prim)


def enumerate_ideals(ctx: FieldContext, n_max: int) -> list[IdealRep]:
    return list(ideal_table(ctx, n_max).rows())


def _unit_power(ctx: FieldContext, n: int) -> tuple[int, int]:
    base = ctx.eps if n >= 0 else tuple(-c for c in conj(ctx.eps))  # eps^-1 = -conj(eps)
    out = (1, 0)
    for _ in range(abs(n)):
        out = mul(ctx, out, base)
    return out


def reduce_generator(ctx: FieldContext, a: int, b: int) -> IdealRep:
    """Canonical representative of the ideal (a + b*omega)."""
    if a == 0 and b == 0:
        raise FieldError("the zero element generates no ideal")
    a, b = int(a), int(b)
    t = angle_of(ctx, a, b)
    shift = round(t / (2 * ctx.log_eps))
    # multiplying by eps shifts the angle by +2 log eps
    a, b = mul(ctx, (a, b), _unit_power(ctx, -shift))
    eps_inv = tuple(-c for c in conj(ctx.eps))
    for _ in range(4):
        if _sign_elt(ctx, a, b) < 0:
            a, b = -a, -b
        s = int(np.sign(norm(ctx, a, b)))
        if bool(_in_window(ctx, a, b, s)):
            break
        t = angle_of(ctx, a, b)
        a, b = mul(ctx, (a, b), eps_inv if t > 0 else ctx.eps)
    else:
        raise FieldError(f"reduction of {(a, b)} did not converge")
    nrm = norm(ctx, a, b)
    return IdealRep(gen=(a, b), norm=abs(nrm), angle=float(angle_of(ctx, a, b)),
                    cls="A1" if nrm > 0 else "A2", primitive=math.gcd(a, b) == 1)


def conjugate_ideal(ctx: FieldContext, ideal: IdealRep) -> IdealRep:
    return reduce_generator(ctx, *conj(ideal.gen))


def ideal_product(ctx: FieldContext, x: IdealRep, y: IdealRep) -> IdealRep:
    return reduce_generator(ctx, *mul(ctx, x.gen, y.gen))
