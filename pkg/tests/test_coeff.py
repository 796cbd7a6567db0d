import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dihedral.coeff import (check_hecke_relations, coeff_tables, hecke_coeffs, primes_upto,
                            rankin_selberg_coeffs, spectral_parameter, sym_square_prime_identity)


@pytest.fixture(scope="module")
def tabs(ctx13):
    return coeff_tables(ctx13, range(1, 17), 10 ** 4)


def test_a1_of_3(ctx13, tabs):
    # 3 splits as (-1 + omega)(-omega) with angles +-0.5696...; a(3) = 2 cos(pi t / log eps)
    t = math.log((math.sqrt(13) + 1) / (math.sqrt(13) - 1))
    assert tabs[1].a[3] == pytest.approx(2 * math.cos(math.pi * t / ctx13.log_eps), abs=1e-14)
    assert tabs[1].a[3] == pytest.approx(0.14587690639729434, abs=1e-14)


def test_unit_and_inert(ctx13, tabs):
    assert tabs[5].a[1] == 1.0
    # 2 is inert in Q(sqrt 13): a(2) = 0 and a(4) = 1 (the ideal (2) has angle 0)
    assert tabs[5].a[2] == 0.0
    assert tabs[5].a[4] == pytest.approx(1.0, abs=1e-15)


def test_spectral_parameter(ctx13):
    assert spectral_parameter(ctx13, 6) == pytest.approx(6 * math.pi / ctx13.log_eps)


@pytest.mark.parametrize("k", [1, 4, 8])
def test_hecke_relations(ctx13, tabs, k):
    rep = check_hecke_relations(tabs[k], ctx13)
    assert rep.ok and rep.max_deviation < 1e-10
    assert rep.checked_pairs > 10_000


def test_ramanujan_at_primes(tabs):
    ps = primes_upto(10 ** 4)
    for k in (1, 7, 16):
        assert np.all(np.abs(tabs[k].a[ps]) <= 2 + 1e-12)


def test_sym_square(ctx13, tabs):
    for k in range(1, 9):
        for p in primes_upto(1000):
            if p == 13:
                continue
            lhs, rhs = sym_square_prime_identity(ctx13, k, int(p), tabs)
            assert lhs == pytest.approx(rhs, abs=1e-10)
    with pytest.raises(ValueError):
        sym_square_prime_identity(ctx13, 1, 13, tabs)


def test_rankin_selberg(ctx13, tabs):
    for k in (1, 3, 8):
        rs = rankin_selberg_coeffs(ctx13, tabs[2 * k].a, 1000)
        assert np.max(np.abs(rs[1:] - tabs[k].a[1:1001] ** 2)) < 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 99), st.integers(2, 99), st.integers(1, 16))
def test_multiplicative(tabs, m, n, k):
    if math.gcd(m, n) == 1:
        a = tabs[k].a
        assert a[m * n] == pytest.approx(a[m] * a[n], abs=1e-12)


def test_bad_arguments(ctx13):
    with pytest.raises(ValueError):
        hecke_coeffs(ctx13, 0, 10)
