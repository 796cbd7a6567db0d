"""Angle gaps, the primitive-orbit structure and the large sieve for the family Xi_k.

Angles live in R / (2 log eps).  Two ideals of one class share an angle exactly
when they have the same primitive part, i.e. b = (m) a0 for a rational integer
m >= 1.  All equal-angle decisions here are made with integers (gcd of the
generator coordinates and norms), never by comparing floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quadfield import FieldContext, IdealRep, IdealTable, angle_of, ideal_table, mul, reduce_generator


@dataclass(frozen=True)
class AngleRecord:
    ideal: IdealRep
    normalized_angle: float
    dist_to_int: float

    def __post_init__(self):
        if not 0.0 <= self.dist_to_int <= 0.5:
            raise ValueError("dist_to_int must lie in [0, 1/2]")


def normalized(ctx: FieldContext, t):
    x = np.mod(np.asarray(t, dtype=float) / (2 * ctx.log_eps), 1.0)
    return x if x.ndim else float(x)


def dist_to_int(x):
    x = np.asarray(x, dtype=float)
    d = np.abs(x - np.round(x))
    return d if d.ndim else float(d)


def _primitive_parts(a, b):
    g = np.gcd(a, b)
    return a // g, b // g, g


def _zero_angle(ctx: FieldContext, a, b) -> np.ndarray:
    """Exact test for t = 0 mod 2 log eps: the primitive part is a unit or a unit times sqrt(q)."""
    pa, pb, _ = _primitive_parts(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    n = np.abs(pa * pa + pa * pb - ctx.m * pb * pb)
    return (n == 1) | (n == ctx.q)


def angle_records(ctx: FieldContext, N: int, table: IdealTable | None = None) -> list[AngleRecord]:
    table = table if table is not None else ideal_table(ctx, N)
    x = normalized(ctx, table.angle)
    d = dist_to_int(x)
    return [AngleRecord(rep, float(xi), float(di)) for rep, xi, di in zip(table.rows(), x, d)]


@dataclass
class GapScan:
    N: int
    c_min: float
    argmin: IdealRep
    norms: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)       # sqrt(N) * ||t / (2 log eps)||
    running_min: np.ndarray = field(repr=False)  # c_min over norms <= norms[i]

    def rows(self):
        for n, v, r in zip(self.norms, self.values, self.running_min):
            yield {"norm": int(n), "value": float(v), "running_min": float(r)}


def angle_gap_scan(ctx: FieldContext, N: int) -> GapScan:
    """c_min(N) = min over ideals of norm <= N with nonzero angle of sqrt(N(a)) ||t_a/(2 log eps)||."""
    if N < 2:
        raise ValueError("N must be >= 2")
    table = ideal_table(ctx, N)
    keep = ~_zero_angle(ctx, table.a, table.b)
    idx = np.nonzero(keep)[0]
    if not len(idx):
        raise ValueError(f"no ideal of norm <= {N} has a nonzero angle")
    vals = np.sqrt(table.norm[idx]) * dist_to_int(normalized(ctx, table.angle[idx]))
    i = int(np.argmin(vals))
    rep = next(r for j, r in enumerate(table.rows()) if j == idx[i])
    return GapScan(N=N, c_min=float(vals[i]), argmin=rep, norms=table.norm[idx],
                   values=vals, running_min=np.minimum.accumulate(vals))


@dataclass
class PairGapScan:
    N: int
    minimum: float
    argmin: tuple[IdealRep, IdealRep]
    pairs: int
    reduction_deviation: float  # |pair value - statement (i) value for c = a conj(b)|


def pairwise_gap_scan(ctx: FieldContext, N: int) -> PairGapScan:
    """Exhaustive scan of sqrt(N(a)N(b)) ||(t_a - t_b)/(2 log eps)|| over unequal-angle pairs."""
    if N > 500:
        raise ValueError("pair scan is quadratic; N must be <= 500")
    table = ideal_table(ctx, N)
    n = len(table)
    i, j = np.triu_indices(n, k=1)
    a1, b1, a2, b2 = table.a[i], table.b[i], table.a[j], table.b[j]
    # c = alpha * conj(beta), conj(c + d omega) = (c + d) - d omega
    ca, cb = a2 + b2, -b2
    pa = a1 * ca + ctx.m * b1 * cb
    pb = a1 * cb + b1 * ca + b1 * cb
    same = _zero_angle(ctx, pa, pb)
    i, j, pa, pb = i[~same], j[~same], pa[~same], pb[~same]
    nn = table.norm[i] * table.norm[j]
    pair = np.sqrt(nn) * dist_to_int((table.angle[i] - table.angle[j]) / (2 * ctx.log_eps))
    single = np.sqrt(np.abs(pa * pa + pa * pb - ctx.m * pb * pb)) \
        * dist_to_int(angle_of(ctx, pa, pb) / (2 * ctx.log_eps))
    w = int(np.argmin(pair))
    rows = list(table.rows())
    return PairGapScan(N=N, minimum=float(pair[w]), argmin=(rows[i[w]], rows[j[w]]),
                       pairs=len(pair), reduction_deviation=float(np.max(np.abs(pair - single))))


def angle_additivity(ctx: FieldContext, N: int, n_pairs: int = 100, seed: int = 0) -> float:
    """max |t_ab - t_a - t_b| mod 2 log eps over random pairs of ideals of norm <= N."""
    rng = np.random.default_rng(seed)
    rows = list(ideal_table(ctx, N).rows())
    worst = 0.0
    for _ in range(n_pairs):
        x, y = (rows[r] for r in rng.integers(len(rows), size=2))
        z = reduce_generator(ctx, *mul(ctx, x.gen, y.gen))
        d = (z.angle - x.angle - y.angle) / (2 * ctx.log_eps)
        worst = max(worst, abs(d - round(d)) * 2 * ctx.log_eps)
    return worst


# -- orbit structure ------------------------------------------------------------

class OrbitStructureError(AssertionError):
    pass


@dataclass
class OrbitGroup:
    cls: str
    primitive: tuple[int, int]
    n0: int
    multipliers: list[int]
    angle: float


def primitive_orbit_structure(ctx: FieldContext, N: int) -> list[OrbitGroup]:
    """Group ideals of norm <= N by (class, primitive part) and verify the orbit law.

    Each group must be {(m) a0 : 1 <= m, m^2 N(a0) <= N}, every member must carry
    the angle of a0 to rounding, and distinct primitive ideals of one class must
    have distinct angles.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    table = ideal_table(ctx, N)
    pa, pb, g = _primitive_parts(table.a, table.b)
    groups: dict[tuple, OrbitGroup] = {}
    for k in range(len(table)):
        cls = "A1" if table.positive[k] else "A2"
        key = (cls, int(pa[k]), int(pb[k]))
        grp = groups.get(key)
        if grp is None:
            n0 = abs(int(pa[k]) ** 2 + int(pa[k]) * int(pb[k]) - ctx.m * int(pb[k]) ** 2)
            grp = groups[key] = OrbitGroup(cls, (int(pa[k]), int(pb[k])), n0, [], float(table.angle[k]))
        grp.multipliers.append(int(g[k]))
        if abs(table.angle[k] - grp.angle) > 1e-9:
            raise OrbitStructureError(f"group {key}: angle drift {table.angle[k] - grp.angle:.3e}")
    for key, grp in groups.items():
        expect = list(range(1, math.isqrt(N // grp.n0) + 1))
        if sorted(grp.multipliers) != expect:
            raise OrbitStructureError(f"group {key}: multipliers {sorted(grp.multipliers)[:8]} != 1..{len(expect)}")
    for cls in ("A1", "A2"):
        angles = np.sort([g.angle for g in groups.values() if g.cls == cls])
        gaps = np.diff(np.append(angles, angles[:1] + 2 * ctx.log_eps)) if len(angles) else angles
        if len(angles) > 1 and np.min(gaps) < 1e-12:
            raise OrbitStructureError(f"class {cls}: two primitive ideals share an angle")
    return sorted(groups.values(), key=lambda g: (g.n0, g.cls, g.angle))


# -- large sieve -------------------------------------------------------------------

@dataclass
class SieveReport:
    K: int
    N: int
    trials: int
    seed: int
    ratios: np.ndarray = field(repr=False)  # LHS / ((K + N) * grouped mass)

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios))


def random_disk(rng: np.random.Generator, size: int) -> np.ndarray:
    """Independent points uniform on the complex unit disk."""
    return np.sqrt(rng.random(size)) * np.exp(2j * np.pi * rng.random(size))


def sieve_sides(ctx: FieldContext, K: int, c: np.ndarray, table: IdealTable) -> tuple[float, float]:
    """(LHS, grouped mass) for one coefficient vector c indexed like `table`."""
    w = c / np.sqrt(table.norm)
    ks = np.arange(1, K + 1)
    phases = np.exp(1j * np.pi * np.outer(ks, table.angle) / ctx.log_eps)
    lhs = float(np.sum(np.abs(phases @ w) ** 2))
    pa, pb, _ = _primitive_parts(table.a, table.b)
    keys = np.stack([table.positive.astype(np.int64), pa, pb], axis=1)
    _, inv = np.unique(keys, axis=0, return_inverse=True)
    mass = np.bincount(inv.ravel(), weights=np.abs(w))
    return lhs, float(np.sum(mass ** 2))


def large_sieve_check(ctx: FieldContext, K: int, N: int, trials: int = 50, seed: int = 7) -> SieveReport:
    if K < 1 or N < 1:
        raise ValueError("K and N must be >= 1")
    table = ideal_table(ctx, N)
    rng = np.random.default_rng(seed)
    ratios = np.empty(trials)
    for i in range(trials):
        lhs, mass = sieve_sides(ctx, K, random_disk(rng, len(table)), table)
        ratios[i] = lhs / ((K + N) * mass)
    return SieveReport(K=K, N=N, trials=trials, seed=seed, ratios=ratios)
