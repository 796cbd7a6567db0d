"""The fourteen acceptance criteria as plain functions, shared by `cli suite` and pytest.

Each criterion returns a CriterionResult; `passed` requires both the numerical
condition and the wall-time budget.  The smoke preset shrinks the sample sizes
so the whole table runs in about two minutes.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import coeff, lfunction, nodal, quadfield, sieve, waveform
from .besselk import bessel_scaled
from .pretrace import (amplifier_asymptotic_check, build_amplifier, count_sums_vs_bounds,
                       gaussian_h, pretrace_inequality, selberg_chain, spherical_transform)

Q = 13


@dataclass(frozen=True)
class SuitePreset:
    name: str
    bessel_points: int = 1000
    hecke_ks: tuple = tuple(range(1, 9))
    sup_ks: tuple = tuple(range(2, 13))
    lattice_z: tuple = (0.1 + 1.2j, 0.2 + 0.35j, 0.4 + 0.12j)
    lattice_L: tuple = (25, 50, 100)
    lattice_delta: tuple = (1e-4, 1e-3, 1e-2)
    pretrace_z: tuple = (0.1 + 1.2j, 0.25 + 0.5j, 0.4 + 0.3j, 2j, 0.33 + 0.15j)
    lvalue_ks: tuple = tuple(range(1, 9))
    moment_K: tuple = (8, 16, 32)
    sieve_KN: tuple = (50, 100, 200)
    nodal_ks: tuple = tuple(range(4, 13))


PRESETS = {
    "full": SuitePreset("full"),
    "smoke": SuitePreset("smoke", bessel_points=150, hecke_ks=(1, 2, 3), sup_ks=(2, 3, 4, 5, 6),
                         lattice_z=(0.1 + 1.2j, 0.2 + 0.35j), lattice_L=(25, 50), lattice_delta=(1e-3, 1e-2),
                         pretrace_z=(0.1 + 1.2j, 2j), lvalue_ks=(1, 2, 3), moment_K=(8, 16),
                         sieve_KN=(50, 100), nodal_ks=(5, 6, 7, 8)),
}


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    limit: float
    metrics: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.title}: {self.detail} ({self.seconds:.1f}s / {self.limit:.0f}s)"


def _ctx():
    return quadfield.make_field_context(Q)


# -- criteria ---------------------------------------------------------------------

def c01_field(p: SuitePreset):
    units = {}
    ok = True
    for q in quadfield.PAPER_LEVELS:
        ctx = quadfield.make_field_context(q)
        brute = quadfield.pell_unit(q)
        n = quadfield.norm(ctx, *ctx.eps)
        units[q] = ctx.eps
        ok &= brute == ctx.eps and n == -1
    return ok, f"units {units} match the Pell search, all norms -1", {"units": units}


def c02_coefficients(p: SuitePreset):
    ctx = _ctx()
    tabs = coeff.coeff_tables(ctx, sorted(set(p.hecke_ks) | {2 * k for k in p.hecke_ks}), 10 ** 4)
    worst = max(coeff.check_hecke_relations(tabs[k], ctx).max_deviation for k in p.hecke_ks)
    sym = 0.0
    for k in p.hecke_ks:
        a, a2 = tabs[k].a, tabs[2 * k].a
        ps = coeff.primes_upto(1000)
        ps = ps[ps != Q]
        chi = np.array([ctx.chi_mod_q[x % Q] for x in ps])
        sym = max(sym, float(np.max(np.abs(a[ps] ** 2 - (1 + chi + a2[ps])))))
    ok = worst < 1e-10 and sym < 1e-10
    return ok, f"Hecke deviation {worst:.1e}, sym-square deviation {sym:.1e}", {"hecke": worst, "sym": sym}


def _bessel_oracle(T: float, x: float) -> float:
    import mpmath
    with mpmath.workdps(50 + int(T * math.pi / 2 / 2.3)):
        return float(mpmath.exp(mpmath.pi * T / 2) * mpmath.besselk(1j * T, x).real)


def c03_bessel(p: SuitePreset):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(p.bessel_points):
        T = rng.uniform(0, 100)
        x = rng.uniform(0.1, 2 * T + 50)
        ref = _bessel_oracle(T, x)
        worst = max(worst, abs(bessel_scaled(T, x) - ref) / abs(ref))
    return worst < 1e-8, f"worst relative error {worst:.1e} over {p.bessel_points} points", {"worst": worst}


def random_gamma0(rng, q: int):
    while True:
        c = q * int(rng.choice([-3, -2, -1, 1, 2, 3]))
        d = int(rng.integers(-50, 51))
        if math.gcd(c, d) == 1:
            return waveform.complete_matrix(c, d)


def c04_automorphy(p: SuitePreset):
    ctx = _ctx()
    h = waveform.form_for_height(ctx, 6, 0.004)
    scan = waveform.supnorm_scan(h, waveform.ScanGrid(y_floor=0.98 * waveform.scan_floor(Q)))
    sup = scan.sup_ratio * scan.norm
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        g = random_gamma0(rng, Q)
        c, d = g[2], g[3]
        z = complex(-d / c + rng.uniform(-0.3, 0.3) / abs(c), rng.uniform(0.5, 1.2) / abs(c))
        lhs = waveform.eval_form(h, waveform.mobius_apply(g, z))
        rhs = ctx.chi_mod_q[d % Q] * waveform.eval_form(h, z)
        worst = max(worst, abs(lhs - rhs) / sup)
    return worst < 1e-6, f"max |phi(gz) - chi(d)phi(z)| / sup = {worst:.1e}", {"worst": worst}


def sup_rows(ks, q: int = Q):
    ctx = quadfield.make_field_context(q)
    floor = 0.98 * waveform.scan_floor(q)
    rows = []
    for k in ks:
        h = waveform.form_for_height(ctx, k, 0.9 * floor)
        rows.append(waveform.supnorm_scan(h, waveform.ScanGrid(y_floor=floor)).rows[0])
    return rows


def c05_supnorm(p: SuitePreset):
    rows = sup_rows(p.sup_ks)
    T = np.array([r["T_k"] for r in rows])
    v = np.array([r["ratio_over_T_to_3_8"] for r in rows])
    slope = float(np.polyfit(np.log(T), np.log(v), 1)[0])
    return slope <= 0.05, f"slope of log(sup/(|phi| T^3/8)) vs log T = {slope:+.3f}", \
        {"slope": slope, "rows": rows}


def c06_amplifier(p: SuitePreset):
    chk = amplifier_asymptotic_check(_ctx(), 1, [1000, 3000, 10000])
    ok = chk.monotone and chk.sqrtN_constant < 10
    devs = ", ".join(f"{d:.4f}" for d in chk.deviation)
    return ok, f"|A/N - w(1)| = {devs}; C = {chk.sqrtN_constant:.2f}", \
        {"deviation": chk.deviation, "C": chk.sqrtN_constant}


def c07_lattice(p: SuitePreset):
    worst = 0.0
    bad = 0
    for z in p.lattice_z:
        for L in p.lattice_L:
            for delta in p.lattice_delta:
                r = count_sums_vs_bounds(z, L, delta, Q)
                worst = max(worst, r.generic_ratio, r.upper_ratio)
                bad += r.parabolic_nonsquare
    ok = bad == 0 and worst <= 100
    return ok, f"non-square parabolic counts {bad}; worst bound ratio {worst:.3f}", \
        {"constant": worst, "nonsquare": bad}


def c08_pretrace(p: SuitePreset):
    ctx = _ctx()
    h = waveform.form_for_height(ctx, 6, 0.06)
    nrm = waveform.l2_norm_numeric(h).norm
    spec = build_amplifier(ctx, 6, 16)
    checks = [pretrace_inequality(h, spec, z, nrm) for z in p.pretrace_z]
    ok = all(c.holds for c in checks)
    worst = max(max(c.lhs_squared, c.lhs_linear) / c.rhs for c in checks)
    return ok, f"{sum(c.holds for c in checks)}/{len(checks)} points hold, worst LHS/RHS {worst:.3f}", \
        {"worst": worst}


def lvalue_stability(ks, q: int = Q):
    ctx = quadfield.make_field_context(q)
    out = []
    swap = lfunction.AFEConfig(smoothing=2.0)
    dbl = lfunction.AFEConfig(length_factor=2.0)
    for k in ks:
        n = max(lfunction.afe_length(ctx, k, 0.0, swap), lfunction.afe_length(ctx, k, 0.0, dbl),
                lfunction.root_number_length(ctx, k))
        cache = lfunction.SeriesCache(coeff.hecke_coeffs(ctx, k, n).a)
        w = lfunction.root_number(ctx, k, cache)
        base = lfunction.afe_lvalue(ctx, k, 0.0, cache, sign=w)
        d1 = abs(base - lfunction.afe_lvalue(ctx, k, 0.0, cache, swap, w))
        d2 = abs(base - lfunction.afe_lvalue(ctx, k, 0.0, cache, dbl, w))
        out.append({"k": k, "sign": w, "value": base.real, "swap": d1, "double": d2})
    return out


def c09_lvalues(p: SuitePreset):
    rows = lvalue_stability(p.lvalue_ks)
    worst = max(max(r["swap"], r["double"]) / max(1.0, abs(r["value"])) for r in rows)
    return worst < 1e-4, f"worst change {worst:.1e} under smoothing swap and doubling", {"rows": rows}


def c10_moment(p: SuitePreset):
    ctx = _ctx()
    avgs = [lfunction.second_moment(ctx, K).average for K in p.moment_K]
    ratios = [b / a for a, b in zip(avgs, avgs[1:])]
    ok = all(r < 2 for r in ratios)
    return ok, "averages " + ", ".join(f"{a:.3f}" for a in avgs) + "; ratios " + \
        ", ".join(f"{r:.3f}" for r in ratios), {"averages": avgs, "ratios": ratios}


def c11_angles(p: SuitePreset):
    ctx = _ctx()
    gap = sieve.angle_gap_scan(ctx, 10 ** 4)
    pair = sieve.pairwise_gap_scan(ctx, 300)
    groups = sieve.primitive_orbit_structure(ctx, 10 ** 4)
    ok = gap.c_min > 0 and pair.minimum > 0
    return ok, (f"c_min(1e4) = {gap.c_min:.4f} at gen {gap.argmin.gen} (norm {gap.argmin.norm}); "
                f"pair min(300) = {pair.minimum:.4f}; {len(groups)} orbit groups verified"), \
        {"c_min": gap.c_min, "pair_min": pair.minimum}


def c12_large_sieve(p: SuitePreset):
    ctx = _ctx()
    ratios = [sieve.large_sieve_check(ctx, K, N, 50).max_ratio for K in p.sieve_KN for N in p.sieve_KN]
    C = max(ratios)
    return C <= 10, f"max LHS/((K+N) RHS) = {C:.3f} = C over {len(ratios)} (K, N) pairs", {"C": C}


def nodal_reports(ks, seg=None, q: int = Q):
    ctx = quadfield.make_field_context(q)
    seg = seg or nodal.GeodesicSegment(1.0, 2.0)
    floor = 0.98 * waveform.scan_floor(q)
    out = []
    for k in ks:
        h = waveform.form_for_height(ctx, k, 0.9 * floor)
        out.append(nodal.nodal_chain_report(h, seg, waveform.l2_norm_numeric(h).norm))
    return out


def c13_nodal(p: SuitePreset):
    reps = nodal_reports(p.nodal_ks)
    slack = max(r.chain_slack for r in reps)
    short = [r.k for r in reps if r.S_beta < r.T ** (1 / 8 - 0.05)]
    ok = slack <= 1 + 1e-6 and not short
    detail = f"max chain slack {slack:.3f}; S_beta " + ", ".join(f"{r.k}:{r.S_beta}" for r in reps)
    if short:
        detail += f"; below T^0.075 at k = {short}"
    return ok, detail, {"slack": slack, "short": short}


def c14_selberg(p: SuitePreset):
    h = gaussian_h(1.0)
    pair = selberg_chain(h, 10.0)
    r = np.linspace(0, 10, 401)
    err = float(np.max(np.abs(spherical_transform(pair, r) - h(r))))
    return err < 1e-4, f"max |h - h_roundtrip| / max h = {err:.1e} on [0, 10]", {"error": err}


CRITERIA = {
    1: ("field arithmetic", 1.0, c01_field),
    2: ("coefficient oracle", 10.0, c02_coefficients),
    3: ("Bessel oracle", 60.0, c03_bessel),
    4: ("automorphy", 60.0, c04_automorphy),
    5: ("sup-norm trend", 1200.0, c05_supnorm),
    6: ("amplifier", 30.0, c06_amplifier),
    7: ("lattice counts", 300.0, c07_lattice),
    8: ("pre-trace inequality", 300.0, c08_pretrace),
    9: ("L-function consistency", 300.0, c09_lvalues),
    10: ("second moment", 600.0, c10_moment),
    11: ("angle gaps", 120.0, c11_angles),
    12: ("large sieve", 120.0, c12_large_sieve),
    13: ("nodal chain", 600.0, c13_nodal),
    14: ("Selberg roundtrip", 30.0, c14_selberg),
}


def run_criterion(number: int, preset: str | SuitePreset = "full") -> CriterionResult:
    p = PRESETS[preset] if isinstance(preset, str) else preset
    title, limit, fn = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        ok, detail, metrics = fn(p)
    except Exception as exc:  # a crash is a failed criterion, reported not raised
        ok, detail, metrics = False, f"{type(exc).__name__}: {exc}", {}
    dt = time.perf_counter() - t0
    if dt > limit:
        detail += f"; over the {limit:.0f}s budget"
    return CriterionResult(number, title, bool(ok) and dt <= limit, detail, dt, limit, metrics)


def run_suite(preset: str = "full", only=None, echo=print) -> list[CriterionResult]:
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    out = []
    for n in sorted(only or CRITERIA):
        r = run_criterion(n, preset)
        if echo:
            echo(r.line())
        out.append(r)
    return out
