import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import k0

from dihedral.besselk import BesselError, BesselQuery, bessel_row, bessel_scaled


def oracle(T, x):
    with mpmath.workdps(50 + int(T * math.pi / 2 / 2.3)):
        return float(mpmath.exp(mpmath.pi * T / 2) * mpmath.besselk(1j * T, x).real)


def test_order_zero_matches_scipy():
    for x in (0.01, 0.5, 1.0, 7.0, 40.0):
        assert bessel_scaled(0.0, x) == pytest.approx(k0(x), rel=1e-12)
    assert bessel_scaled(0.0, 1.0) == pytest.approx(0.42102443824070834, rel=1e-14)


@pytest.mark.parametrize("T, x", [(10, 50), (20, 19.9), (20, 20.0001), (50, 1.0), (100, 0.1),
                                  (100, 99.99), (300, 5.0), (0.001, 0.001)])
def test_hard_points(T, x):
    assert bessel_scaled(T, x) == pytest.approx(oracle(T, x), rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 80), st.floats(0.05, 200))
def test_random_against_mpmath(T, x):
    ref = oracle(T, x)
    assert abs(bessel_scaled(T, x) - ref) <= 1e-9 * abs(ref) + 1e-280


def test_even_in_order():
    assert bessel_scaled(-12.5, 3.0) == bessel_scaled(12.5, 3.0)


def test_row_matches_scalar():
    xs = np.linspace(0.2, 90, 157)
    row = bessel_row(31.4, xs)
    for x, v in zip(xs[::13], row[::13]):
        assert v == pytest.approx(bessel_scaled(31.4, x), rel=1e-11, abs=1e-300)


def test_deep_tail_does_not_raise():
    assert 0 <= bessel_scaled(0.5, 722.0) < 1e-300


@pytest.mark.parametrize("kw", [dict(T=1, x=0.0), dict(T=1, x=-1), dict(T=1, x=float("inf")),
                                dict(T=1, x=1, rel_tol=1e-14), dict(T=1, x=1, rel_tol=1e-2),
                                dict(T=float("nan"), x=1)])
def test_query_validation(kw):
    with pytest.raises(BesselError):
        BesselQuery(**kw)


def test_row_validation_names_index():
    with pytest.raises(BesselError, match="index 2"):
        bessel_row(3.0, [1.0, 2.0, 2.0, 3.0])
    assert len(bessel_row(3.0, [])) == 0
