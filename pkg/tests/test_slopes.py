from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from decaykit.slopes import (
    INFINITY,
    Slope,
    WindowVerdict,
    ZZOrder,
    boundary_slope,
    close_under_reversal,
    cramer_decompose,
    decayed_window_check,
    implies_on_family,
    reduce_slope,
    reverse_order,
    slope_from_value,
    slope_sign,
)

small = st.integers(-20, 20)


@st.composite
def orders(draw):
    f1 = (draw(small), draw(small))
    f2 = (draw(small), draw(small))
    assume(f1[0] * f2[1] - f1[1] * f2[0] != 0)
    return ZZOrder(f1, f2)


@st.composite
def slopes(draw, max_n=30):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(-200, 200))
    return reduce_slope(m, n).primitive()


def test_reduce_examples():
    assert reduce_slope(10, 4) == Slope(5, 2, 2)
    assert reduce_slope(5, 1) == Slope(5, 1, 1)
    assert reduce_slope(-6, 9) == Slope(-2, 3, 3)
    assert reduce_slope(3, 0).value() is INFINITY


def test_invalid_slopes():
    with pytest.raises(ValueError):
        Slope(0, 0)
    with pytest.raises(ValueError):
        Slope(2, 4)
    with pytest.raises(ValueError):
        ZZOrder((1, 2), (2, 4))


def test_cramer_worked_instance():
    assert cramer_decompose(Slope(1, 3), Slope(1, 1), Slope(1, 2)) == (1, 1, 2)


def test_window_examples():
    assert decayed_window_check(ZZOrder((1, 0), (0, 1)), 5) is WindowVerdict.ALL_POSITIVE
    assert decayed_window_check(ZZOrder((0, 1), (1, 0)), 5) is WindowVerdict.ALL_POSITIVE
    assert decayed_window_check(ZZOrder((0, -1), (1, 0)), 5) is WindowVerdict.ALL_NEGATIVE
    # boundary slope 7: alpha_7 negative by tie-break, alpha_8 positive
    o = ZZOrder((1, -7), (-1, 0))
    assert boundary_slope(o) == 7
    assert slope_sign(o, Slope(7, 1)) == -1 and slope_sign(o, Slope(8, 1)) == 1
    assert decayed_window_check(o, 5) is WindowVerdict.MIXED


def test_window_inclusive_at_r():
    # f1 vanishes exactly on alpha_5, tie-break positive there
    assert decayed_window_check(ZZOrder((1, -5), (1, 0)), 5) is WindowVerdict.ALL_POSITIVE
    assert decayed_window_check(ZZOrder((1, -5), (-1, 0)), 5) is WindowVerdict.MIXED


@given(orders(), slopes(), st.integers(1, 50))
def test_weight_invariance(o, s, w):
    assert slope_sign(o, s) == slope_sign(o, s.with_weight(w))


@given(orders(), slopes())
def test_reversal_flips_every_sign(o, s):
    assert slope_sign(reverse_order(o), s) == -slope_sign(o, s)


@given(orders(), st.fractions(min_value=-50, max_value=50, max_denominator=20))
def test_window_matches_sampling(o, r):
    verdict = decayed_window_check(o, r)
    samples = [slope_from_value(r + Fraction(i, d)) for i in range(0, 60) for d in (1, 7)]
    samples.append(slope_from_value(r + 10**6))
    b = boundary_slope(o)
    if b is not INFINITY and b >= r:
        samples += [slope_from_value(b), slope_from_value(b + Fraction(1, 97))]
    signs = {slope_sign(o, s) for s in samples}
    if verdict is WindowVerdict.ALL_POSITIVE:
        assert signs == {1}
    elif verdict is WindowVerdict.ALL_NEGATIVE:
        assert signs == {-1}
    else:
        assert signs == {1, -1}
