import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from dihedral.coeff import coeff_tables, primes_upto
from dihedral.pretrace import (B_of_N, LatticeQuery, bump, build_amplifier, count_matrices, count_matrices_oracle,
                               count_sums_vs_bounds, gaussian_h, h_test, kernel_shape, log_deriv_coeffs, mellin,
                               pretrace_inequality, selberg_chain, spherical_transform, w_tilde_one)
from dihedral.pretrace import test_kernel as make_kernel
from dihedral.pretrace.lattice import enumerate_matrices
from dihedral.pretrace.selberg import rho_of_u, u_of_rho


def test_gaussian_k0_matches_inversion_integral():
    # k(0) = (1/4 pi) int_R r tanh(pi r) h(r) dr
    ref = 2 * quad(lambda r: r * math.tanh(math.pi * r) * math.exp(-r * r), 0, 40)[0] / (4 * math.pi)
    assert selberg_chain(gaussian_h(1.0), 10.0).k0 == pytest.approx(ref, rel=1e-10)


def test_gaussian_g_closed_form():
    pair = selberg_chain(gaussian_h(1.0), 10.0)
    xi = np.linspace(0, 6, 13)
    closed = np.exp(-xi ** 2 / 4) / (2 * math.sqrt(math.pi))
    assert np.max(np.abs(pair.g(xi) - closed)) < 1e-12


def test_roundtrips():
    r = np.linspace(0, 10, 201)
    h1 = gaussian_h(1.0)
    assert np.max(np.abs(spherical_transform(selberg_chain(h1, 10.0), r) - h1(r))) < 1e-9
    h3 = gaussian_h(3.0)
    got = spherical_transform(selberg_chain(h3, 20.0, freq=3.0), r)
    assert np.max(np.abs(got - h3(r)) / h3(r)) < 1e-5


def test_u_rho_inverse():
    rho = np.linspace(0, 10, 50)
    assert np.allclose(rho_of_u(u_of_rho(rho)), rho, atol=1e-12)


def test_test_function_positive():
    h = h_test(15.0)
    assert np.min(h(np.linspace(0, 40, 4001))) > 0
    assert np.min(h(1j * np.linspace(0, 0.5, 51)).real) > 0


def test_kernel_shape_bounded():
    for T in (10.0, 20.0):
        s = kernel_shape(make_kernel(T))
        assert not s.flagged
        assert 0.2 < s.k0_over_T < 0.35


queries = st.builds(LatticeQuery,
                    z=st.builds(complex, st.floats(-0.5, 0.5), st.floats(0.15, 1.5)),
                    ell=st.integers(1, 12), delta=st.floats(1e-3, 0.6), q=st.sampled_from([1, 13]))


@settings(max_examples=60, deadline=None)
@given(queries)
def test_fast_counts_match_loop_oracle(qy):
    assert count_matrices(qy) == count_matrices_oracle(qy)


def test_parabolic_only_for_squares():
    assert count_matrices(LatticeQuery(2j, 1, 0.1, 13)) == (0, 0, 2, 2)
    for ell in (2, 3, 5, 6, 7, 8):
        assert count_matrices(LatticeQuery(0.2 + 0.35j, ell, 0.05, 13))[2] == 0


def test_enumerated_matrices_are_in_gamma0():
    b = enumerate_matrices(0.25 + 0.4j, 6, 0.5, 13)
    assert len(b) > 0
    assert np.all(b.a * b.d - b.b * b.c == 6)
    assert np.all(b.c % 13 == 0)


def test_bound_ratio_one_cell():
    r = count_sums_vs_bounds(0.2 + 0.35j, 25, 1e-2, 13)
    assert r.parabolic_nonsquare == 0
    assert r.generic_sum > 0
    assert max(r.generic_ratio, r.upper_ratio) < 100


def test_w_tilde_one():
    assert w_tilde_one(bump) == pytest.approx(0.6034501612189381, rel=1e-12)
    assert mellin(bump, 1.0) == pytest.approx(0.6034501612189381, rel=1e-8)


def test_log_derivative_coefficients(ctx13):
    tabs = coeff_tables(ctx13, (3, 6), 5000)
    b = log_deriv_coeffs(ctx13, 3, 5000, tabs[6].a)
    ps = primes_upto(5000)
    assert np.allclose(b[ps], np.log(ps) * tabs[3].a[ps] ** 2, atol=1e-12)
    for p in ps[ps < 70]:
        pj = int(p) ** 2
        while pj <= 5000:
            assert abs(b[pj] / math.log(p)) <= 7
            pj *= int(p)
    # b vanishes off prime powers
    assert b[6] == 0 and b[10] == 0
    # B_k(N) tracks A_k(N) up to O(sqrt N)
    sel = ps[(ps >= 1000) & (ps <= 2000)]
    A = float(np.sum(bump(sel / 1000) * np.log(sel) * tabs[3].a[sel] ** 2))
    assert abs(A - B_of_N(b, 1000)) < 10 * math.sqrt(1000)


def test_amplifier_spec(ctx13):
    spec = build_amplifier(ctx13, 6, 16)
    assert spec.A > 0
    assert all(16 <= p <= 32 for p in spec.primes)


def test_pretrace_holds_at_one_point(ctx13, form6, norm6):
    chk = pretrace_inequality(form6, build_amplifier(ctx13, 6, 16), 0.25 + 0.5j, norm6)
    assert chk.holds and chk.rhs > 0
