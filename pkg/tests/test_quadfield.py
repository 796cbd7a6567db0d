import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dihedral.quadfield import (PAPER_LEVELS, FieldError, conjugate_ideal, ideal_count_oracle, ideal_product,
                                ideal_table, make_field_context, norm, pell_unit, reduce_generator)


@pytest.mark.parametrize("q", PAPER_LEVELS)
def test_unit_matches_pell_search(q):
    ctx = make_field_context(q)
    assert pell_unit(q) == ctx.eps
    assert norm(ctx, *ctx.eps) == -1


def test_q13_constants(ctx13):
    assert ctx13.eps == (1, 1)
    # eps = (3 + sqrt 13) / 2
    assert ctx13.log_eps == pytest.approx(math.log((3 + math.sqrt(13)) / 2), abs=1e-15)
    assert ctx13.log_eps == pytest.approx(1.1947632172871094, abs=1e-15)


@pytest.mark.parametrize("q, msg", [(12, "1 mod 4"), (21, "prime"), (5, "exceed 8")])
def test_bad_levels(q, msg):
    with pytest.raises(FieldError, match=msg):
        make_field_context(q)


@pytest.mark.parametrize("q", PAPER_LEVELS)
def test_ideal_counts_match_divisor_sum(q):
    ctx = make_field_context(q)
    got = np.bincount(ideal_table(ctx, 3000).norm, minlength=3001)
    assert np.array_equal(got, ideal_count_oracle(ctx, 3000))


def test_angles_in_window(ctx13):
    t = ideal_table(ctx13, 5000).angle
    assert np.all(t > -ctx13.log_eps - 1e-12) and np.all(t <= ctx13.log_eps + 1e-12)


elements = st.tuples(st.integers(-60, 60), st.integers(-60, 60)).filter(lambda x: x != (0, 0))


@settings(max_examples=200, deadline=None)
@given(elements)
def test_reduction_is_canonical(ctx13, x):
    r = reduce_generator(ctx13, *x)
    assert r.norm == abs(norm(ctx13, *x))
    assert reduce_generator(ctx13, *r.gen) == r
    # a unit multiple reduces to the same representative
    e = ctx13.eps
    y = (x[0] * e[0] + ctx13.m * x[1] * e[1], x[0] * e[1] + x[1] * e[0] + x[1] * e[1])
    assert reduce_generator(ctx13, *y) == r


@settings(max_examples=100, deadline=None)
@given(elements, elements)
def test_product_norm_and_conjugation(ctx13, x, y):
    a, b = reduce_generator(ctx13, *x), reduce_generator(ctx13, *y)
    assert ideal_product(ctx13, a, b).norm == a.norm * b.norm
    assert conjugate_ideal(ctx13, conjugate_ideal(ctx13, a)) == a
