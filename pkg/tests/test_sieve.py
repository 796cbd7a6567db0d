import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dihedral.quadfield import ideal_table, make_field_context
from dihedral.sieve import (AngleRecord, angle_additivity, angle_gap_scan, angle_records, large_sieve_check,
                            pairwise_gap_scan, primitive_orbit_structure, random_disk, sieve_sides)


def test_cmin_against_high_precision(ctx13):
    g = angle_gap_scan(ctx13, 10 ** 4)
    assert g.argmin.gen == (-1, 1) and g.argmin.norm == 3
    with mpmath.workdps(40):
        r = mpmath.sqrt(13)
        t = mpmath.log(abs((r - 1) / 2 / ((-1 - r) / 2)))
        x = t / (2 * mpmath.log((3 + r) / 2))
        ref = mpmath.sqrt(3) * abs(x - mpmath.nint(x))
    assert g.c_min == pytest.approx(float(ref), abs=1e-13)
    assert np.all(np.diff(g.running_min) <= 0)


def test_zero_angles_excluded(ctx13):
    g = angle_gap_scan(ctx13, 200)
    assert g.c_min > 0
    tab = ideal_table(ctx13, 200)
    assert len(g.values) < len(tab)
    # (2), (3), ..., (sqrt 13) all carry angle 0
    assert np.sum(np.abs(tab.angle) < 1e-12) == len(tab) - len(g.values)


@pytest.mark.parametrize("q", [13, 29, 53])
def test_cmin_positive_other_levels(q):
    assert angle_gap_scan(make_field_context(q), 3000).c_min > 0


def test_pairwise(ctx13):
    p = pairwise_gap_scan(ctx13, 300)
    assert p.minimum > 0
    assert p.reduction_deviation < 1e-11
    with pytest.raises(ValueError):
        pairwise_gap_scan(ctx13, 600)


def test_angle_additivity(ctx13):
    assert angle_additivity(ctx13, 5000, 100) < 1e-12


def test_orbit_structure(ctx13):
    groups = primitive_orbit_structure(ctx13, 10 ** 4)
    unit = groups[0]
    assert unit.cls == "A1" and unit.primitive == (1, 0) and unit.multipliers == list(range(1, 101))
    for g in groups:
        assert len(g.multipliers) == math.isqrt(10 ** 4 // g.n0)


def test_records(ctx13):
    rec = angle_records(ctx13, 50)
    assert all(0 <= r.dist_to_int <= 0.5 for r in rec)
    with pytest.raises(ValueError):
        AngleRecord(rec[0].ideal, 0.2, 0.7)


def test_single_ideal_vector(ctx13):
    tab = ideal_table(ctx13, 60)
    c = np.zeros(len(tab), complex)
    c[5] = 0.7
    lhs, mass = sieve_sides(ctx13, 40, c, tab)
    assert lhs == pytest.approx(40 * 0.49 / tab.norm[5])
    assert lhs / ((40 + 60) * mass) <= 1


def test_disk_samples():
    z = random_disk(np.random.default_rng(0), 10000)
    assert np.all(np.abs(z) <= 1)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(0.5, abs=0.02)


def test_large_sieve_sweep(ctx13):
    ratios = [large_sieve_check(ctx13, 50, N, 20).max_ratio for N in (25, 50, 100, 200)]
    assert max(ratios) < 10
    assert ratios[-1] <= ratios[0]


def test_large_sieve_seeded(ctx13):
    a = large_sieve_check(ctx13, 30, 40, 5, seed=3).ratios
    b = large_sieve_check(ctx13, 30, 40, 5, seed=3).ratios
    assert np.array_equal(a, b)
