import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dihedral.waveform import (CoefficientShortage, ScanGrid, SurfacePoint, boundary_height, complete_matrix,
                               eval_form, fricke, fricke_reduce, form_for_height, l2_norm_numeric, make_form,
                               mobius_apply, scan_floor, supnorm_scan, truncation_length)

# Petersson norm of phi_1 (q = 13, scaled by e^{pi T/2}) from a brute-force sum over the
# 14 cosets I, S T^j of Gamma_0(13) in SL2(Z), 20-point Gauss-Legendre per region, F cut
# at y = 165; no Fricke symmetry is used.
BRUTE_NORM_K1 = 2.73635592008298


def test_truncation_lengths():
    assert truncation_length(10.0, 10.0, 1e-10) == 1
    assert truncation_length(50.0, 0.3, 1e-8) == 49
    with pytest.raises(ValueError):
        truncation_length(10.0, 0.0, 1e-10)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 60), st.floats(0.02, 3.0))
def test_truncation_monotone_in_height(T, y):
    assert truncation_length(T, y, 1e-10) >= truncation_length(T, 1.5 * y, 1e-10)
    assert truncation_length(T, y, 1e-12) >= truncation_length(T, y, 1e-8)


def test_truncation_tail_is_small(ctx13):
    h = form_for_height(ctx13, 8, 0.05)
    N = truncation_length(h.T, 0.1, 1e-10)
    full = make_form(ctx13, 8, 3 * N)
    # adding 2N more terms must not move the value by more than tol
    from dihedral.waveform import _radial
    rad = _radial(full, 0.1, 3 * N)
    assert abs(rad[N:].sum()) < 1e-10 * max(1.0, abs(rad.sum()))


def test_shortage_is_reported(ctx13):
    h = make_form(ctx13, 6, 5)
    with pytest.raises(CoefficientShortage) as ei:
        eval_form(h, 0.1 + 0.05j)
    assert ei.value.available == 5 and ei.value.required > 5


def test_surface_point_validation():
    with pytest.raises(ValueError):
        SurfacePoint(0.0, 0.0)


def test_automorphy_with_nebentypus(ctx13, form6):
    rng = np.random.default_rng(3)
    done = 0
    while done < 8:
        c = 13 * int(rng.choice([-2, -1, 1, 2]))
        d = int(rng.integers(-40, 41))
        if math.gcd(c, d) != 1:
            continue
        g = complete_matrix(c, d)
        assert g[0] * g[3] - g[1] * g[2] == 1 and g[2] == c and g[3] == d
        z = complex(-d / c + 0.1 / abs(c), 0.8 / abs(c))
        lhs = eval_form(form6, mobius_apply(g, z))
        assert lhs == pytest.approx(ctx13.chi_mod_q[d % 13] * eval_form(form6, z), abs=1e-9)
        done += 1


@pytest.mark.parametrize("z", [0.2 + 0.3j, -0.31 + 0.12j])
def test_fricke_eigenvalue(form6, z):
    assert eval_form(form6, fricke(13, z)) == pytest.approx(eval_form(form6, z), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(0.01, 0.5))
def test_fricke_reduce_lands_above_boundary(x, y):
    p = fricke_reduce(13, complex(x, y))
    assert p.y >= max(y, boundary_height(13, p.x)) - 1e-9


def test_fricke_reduce_preserves_values(form6):
    for z in (0.11 + 0.02j, -0.4 + 0.015j, 0.37 + 0.05j):
        p = fricke_reduce(13, z)
        assert abs(eval_form(form6, p.z)) == pytest.approx(abs(eval_form(form6, z)), abs=1e-8)


def test_scan_floor_q13():
    # the lowest point of the Fricke-reduced region, below 1/sqrt(13) = 0.277
    assert scan_floor(13) == pytest.approx(0.06662, abs=2e-4)
    assert scan_floor(13) < 1 / math.sqrt(13)


def test_norm_converges(ctx13):
    h = form_for_height(ctx13, 1, 0.002)
    r = l2_norm_numeric(h)
    assert r.residual < 1e-10
    assert r.norm == pytest.approx(2.736355920082981, rel=1e-10)


def test_norm_against_coset_oracle(ctx13):
    if BRUTE_NORM_K1 is None:
        pytest.skip("brute-force oracle value not frozen")
    h = form_for_height(ctx13, 1, 0.002)
    assert l2_norm_numeric(h).norm == pytest.approx(BRUTE_NORM_K1, rel=1e-10)


def test_sup_scan_small_k(ctx13):
    floor = 0.98 * scan_floor(13)
    h = form_for_height(ctx13, 3, 0.9 * floor)
    res = supnorm_scan(h, ScanGrid(y_floor=floor))
    row = res.rows[0]
    assert res.argmax.y >= floor
    # the scan sup dominates every sampled value
    for z in (0.1 + 0.5j, 0.25 + 0.3j, 1j, 0.4 + 0.1j):
        assert abs(eval_form(h, z)) / res.norm <= res.sup_ratio * (1 + 1e-9)
    assert 0.2 < row["ratio_over_T_to_3_8"] < 0.6
