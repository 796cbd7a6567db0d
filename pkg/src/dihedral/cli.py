"""Command-line front door.

    dihedral field --q 13
    dihedral supnorm --q 13 --k-min 2 --k-max 12 --out sup.csv
    dihedral suite --preset smoke

Every artifact starts with '#' metadata lines (version, config echo, seed and
wall time); only the wall-time line varies between identical runs.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__

SCHEMA_VERSION = 1
THREADS_ENV = "DIHEDRAL_THREADS"


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass
class ExperimentConfig:
    command: str
    q: int = 13
    k: int = 6
    k_min: int = 2
    k_max: int = 12
    max_norm: int = 1000
    T: float = 10.0
    x: float = 1.0
    rel_tol: float = 1e-10
    tol: float = 1e-10
    z: str = "0.1+1.2j"
    ell: int = 1
    delta: float = 1e-3
    N: int = 16
    t: float = 0.0
    K: int = 16
    trials: int = 50
    segment: str = "1:2"
    points_per_wave: float = 6.0
    preset: str = "smoke"
    out: str | None = None
    seed: int = 7
    threads: int = 1
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        from .quadfield import is_prime
        bad = []
        if self.q % 4 != 1:
            bad.append(f"q={self.q}: q must satisfy q = 1 mod 4")
        if not is_prime(self.q) or self.q <= 8:
            bad.append(f"q={self.q}: q must be a prime above 8")
        if self.k < 1:
            bad.append(f"k={self.k}: k must be >= 1")
        if not 1 <= self.k_min <= self.k_max:
            bad.append(f"k-min={self.k_min}, k-max={self.k_max}: need 1 <= k-min <= k-max")
        if self.max_norm < 2:
            bad.append(f"max-norm={self.max_norm}: must be >= 2")
        if not self.x > 0:
            bad.append(f"x={self.x}: must be positive")
        if not 1e-12 <= self.rel_tol <= 1e-4:
            bad.append(f"rel-tol={self.rel_tol}: must lie in [1e-12, 1e-4]")
        if not 0 < self.delta:
            bad.append(f"delta={self.delta}: must be positive")
        if self.ell < 1:
            bad.append(f"ell={self.ell}: must be >= 1")
        if self.N < 10:
            bad.append(f"N={self.N}: amplifier length must be >= 10")
        if self.K < 1:
            bad.append(f"K={self.K}: must be >= 1")
        if self.trials < 1:
            bad.append(f"trials={self.trials}: must be >= 1")
        if self.threads < 1:
            bad.append(f"threads={self.threads}: must be >= 1")
        try:
            z = complex(self.z.replace(" ", ""))
            if z.imag <= 0:
                bad.append(f"z={self.z}: must lie in the upper half-plane")
        except ValueError:
            bad.append(f"z={self.z}: not a complex number like 0.1+1.2j")
        try:
            a, b = (float(s) for s in self.segment.split(":"))
            if not 0 < a < b:
                bad.append(f"segment={self.segment}: need 0 < a < b")
        except ValueError:
            bad.append(f"segment={self.segment}: expected a:b")
        if self.command == "suite" and self.preset not in ("smoke", "full"):
            bad.append(f"preset={self.preset}: choose smoke or full")
        if bad:
            raise ConfigError(bad)

    @property
    def zc(self) -> complex:
        return complex(self.z.replace(" ", ""))

    def ks(self):
        return list(range(self.k_min, self.k_max + 1))


def parallel_map(fn, items, threads: int):
    """Ordered map; results come back in input order whatever the thread count."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# -- output ----------------------------------------------------------------------

def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.15g}"
    if isinstance(v, (complex, np.complexfloating)):
        return f"{v.real:.15g}{v.imag:+.15g}j"
    return str(v)


def render(cfg: ExperimentConfig, rows: list[dict], wall: float, fmt_name: str = "csv") -> str:
    meta = {k: v for k, v in asdict(cfg).items() if k not in ("out", "extra")}
    if fmt_name == "json":
        body = {"schema_version": SCHEMA_VERSION, "version": __version__, "config": meta,
                "seed": cfg.seed, "wall_time_s": f"{wall:.3f}",
                "rows": [{k: fmt(v) for k, v in r.items()} for r in rows]}
        return json.dumps(body, indent=1, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# dihedral {__version__}\n")
    buf.write(f"# config: {json.dumps(meta, sort_keys=True)}\n")
    buf.write(f"# seed: {cfg.seed}\n")
    buf.write(f"# wall_time_s: {wall:.3f}\n")
    if rows:
        cols = ["schema_version"] + list(rows[0])
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([SCHEMA_VERSION] + [fmt(r[c]) for c in cols[1:]])
    return buf.getvalue()


# -- commands -----------------------------------------------------------------------

def _ctx(cfg):
    from .quadfield import make_field_context
    return make_field_context(cfg.q)


def cmd_field(cfg):
    ctx = _ctx(cfg)
    return [{"q": ctx.q, "eps_a": ctx.eps[0], "eps_b": ctx.eps[1], "eps": ctx.eps_real,
             "log_eps": ctx.log_eps, "T_1": np.pi / ctx.log_eps}]


def cmd_coeffs(cfg):
    from .coeff import hecke_coeffs
    tab = hecke_coeffs(_ctx(cfg), cfg.k, cfg.max_norm)
    return [{"k": cfg.k, "n": n, "a": float(tab.a[n])} for n in range(1, cfg.max_norm + 1)]


def cmd_bessel(cfg):
    from .besselk import bessel_scaled
    return [{"T": cfg.T, "x": cfg.x, "scaled_K": bessel_scaled(cfg.T, cfg.x, cfg.rel_tol)}]


def cmd_supnorm(cfg):
    from .waveform import ScanGrid, form_for_height, scan_floor, supnorm_scan
    ctx = _ctx(cfg)
    floor = 0.98 * scan_floor(cfg.q)

    def one(k):
        h = form_for_height(ctx, k, 0.9 * floor, cfg.tol)
        grid = ScanGrid(points_per_wave=cfg.points_per_wave, y_floor=floor, tol=cfg.tol)
        return supnorm_scan(h, grid).rows[0]
    return parallel_map(one, cfg.ks(), cfg.threads)


def cmd_latticecount(cfg):
    from .pretrace.lattice import LatticeQuery, count_matrices
    g, u, p, tot = count_matrices(LatticeQuery(cfg.zc, cfg.ell, cfg.delta, cfg.q))
    return [{"z": cfg.zc, "ell": cfg.ell, "delta": cfg.delta, "M_star": g, "M_upper": u,
             "M_parabolic": p, "total": tot}]


def cmd_pretrace(cfg):
    from .pretrace import build_amplifier, pretrace_inequality
    from .waveform import form_for_height, l2_norm_numeric
    ctx = _ctx(cfg)
    h = form_for_height(ctx, cfg.k, min(0.06, 0.5 * cfg.zc.imag))
    spec = build_amplifier(ctx, cfg.k, cfg.N)
    chk = pretrace_inequality(h, spec, cfg.zc, l2_norm_numeric(h).norm)
    return [{"k": cfg.k, "N": cfg.N, "z": chk.z, "lhs_squared": chk.lhs_squared,
             "lhs_linear": chk.lhs_linear, "rhs": chk.rhs, "holds": chk.holds}]


def cmd_lvalue(cfg):
    from .lfunction import afe_lvalue
    v = afe_lvalue(_ctx(cfg), cfg.k, cfg.t)
    return [{"k": cfg.k, "t": cfg.t, "re": v.real, "im": v.imag}]


def cmd_secondmoment(cfg):
    from .lfunction import second_moment
    r = second_moment(_ctx(cfg), cfg.K, cfg.t)
    return [{"K": r.K, "t": r.t, "average": r.average, "k": k, "abs_L_squared": v, "sign": r.signs[k]}
            for k, v in sorted(r.values.items())]


def cmd_anglegap(cfg):
    from .sieve import angle_gap_scan
    g = angle_gap_scan(_ctx(cfg), cfg.max_norm)
    cfg.extra["summary"] = f"c_min={g.c_min:.15g} at {g.argmin.gen}"
    return list(g.rows())


def cmd_largesieve(cfg):
    from .sieve import large_sieve_check
    r = large_sieve_check(_ctx(cfg), cfg.K, cfg.N, cfg.trials, cfg.seed)
    return [{"K": r.K, "N": r.N, "trial": i, "seed": r.seed, "ratio": float(v)} for i, v in enumerate(r.ratios)]


def cmd_nodal(cfg):
    from .nodal import GeodesicSegment, nodal_chain_report
    from .waveform import form_for_height, l2_norm_numeric, scan_floor
    ctx = _ctx(cfg)
    a, b = (float(s) for s in cfg.segment.split(":"))
    seg = GeodesicSegment(a, b)
    floor = 0.98 * scan_floor(cfg.q)

    def one(k):
        h = form_for_height(ctx, k, 0.9 * floor)
        return nodal_chain_report(h, seg, l2_norm_numeric(h).norm).row()
    return parallel_map(one, cfg.ks(), cfg.threads)


def cmd_suite(cfg):
    from .acceptance import run_suite
    res = run_suite(cfg.preset, echo=lambda s: print(s, file=sys.stderr, flush=True))
    cfg.extra["failed"] = [r.number for r in res if not r.passed]
    return [{"criterion": r.number, "title": r.title, "passed": r.passed, "seconds": r.seconds,
             "detail": r.detail} for r in res]


COMMANDS = {
    "field": cmd_field, "coeffs": cmd_coeffs, "bessel": cmd_bessel, "supnorm": cmd_supnorm,
    "latticecount": cmd_latticecount, "pretrace": cmd_pretrace, "lvalue": cmd_lvalue,
    "secondmoment": cmd_secondmoment, "anglegap": cmd_anglegap, "largesieve": cmd_largesieve,
    "nodal": cmd_nodal, "suite": cmd_suite,
}

_FLAGS = {
    "field": ["q"],
    "coeffs": ["q", "k", "max_norm"],
    "bessel": ["T", "x", "rel_tol"],
    "supnorm": ["q", "k_min", "k_max", "points_per_wave", "tol"],
    "latticecount": ["q", "z", "ell", "delta"],
    "pretrace": ["q", "k", "N", "z"],
    "lvalue": ["q", "k", "t"],
    "secondmoment": ["q", "K", "t"],
    "anglegap": ["q", "max_norm"],
    "largesieve": ["q", "K", "N", "trials"],
    "nodal": ["q", "k_min", "k_max", "segment"],
    "suite": ["preset"],
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dihedral", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    defaults = ExperimentConfig("x")
    for name, flags in _FLAGS.items():
        sp = sub.add_parser(name)
        for f in flags:
            d = getattr(defaults, f)
            kw = {"type": type(d), "default": argparse.SUPPRESS, "help": f"default {d}"}
            if f == "preset":
                kw["choices"] = ["smoke", "full"]
            sp.add_argument("--" + f.replace("_", "-"), dest=f, **kw)
        sp.add_argument("--out", default=argparse.SUPPRESS, help="write CSV (or JSON for *.json) here")
        sp.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        sp.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help=f"worker threads; {THREADS_ENV} overrides the default of 1")
        sp.add_argument("--config", default=None, help="JSON file of option values; flags win")
    return ap


def config_from_args(argv=None) -> ExperimentConfig:
    ns = vars(build_parser().parse_args(argv))
    values = {}
    path = ns.pop("config", None)
    if path:
        with open(path) as fh:
            values.update({k.replace("-", "_"): v for k, v in json.load(fh).items()})
    if THREADS_ENV in os.environ:
        values["threads"] = int(os.environ[THREADS_ENV])
    values.update(ns)
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError([f"{u}: unknown option" for u in unknown])
    return ExperimentConfig(**values)


def run(cfg: ExperimentConfig) -> int:
    cfg.validate()
    t0 = time.perf_counter()
    rows = COMMANDS[cfg.command](cfg)
    text = render(cfg, rows, time.perf_counter() - t0,
                  "json" if cfg.out and cfg.out.endswith(".json") else "csv")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if "summary" in cfg.extra:
        print(cfg.extra["summary"], file=sys.stderr)
    if cfg.extra.get("failed"):
        print(json.dumps({"error": "criteria failed", "criteria": cfg.extra["failed"]}), file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    try:
        return run(config_from_args(argv))
    except ConfigError as exc:
        print(json.dumps({"error": "invalid configuration", "fields": exc.problems}), file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
