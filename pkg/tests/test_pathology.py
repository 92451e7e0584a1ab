from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from nadyn.arith import UltraNorm, padic_abs
from nadyn.errors import DomainError
from nadyn.pathology import (DigitStream, Interval, decay_sequence, enclosing_interval,
                             k_carry_formula, k_digit_formula, upsilon, upsilon_union)

F = Fraction


def test_upsilon_examples():
    assert upsilon(Interval(2, 0, F(1, 2))) == 2
    assert upsilon(Interval(2, F(1, 2), 1)) == -1
    assert upsilon(Interval(2, 0, F(1, 2))) + upsilon(Interval(2, F(1, 2), 1)) == 1 == upsilon(Interval(2, 0, 1))


def test_interval_validation():
    with pytest.raises(ValueError):
        Interval(2, F(1, 2), F(1, 2))
    with pytest.raises(ValueError):
        Interval(2, F(1, 2), F(1, 4))
    with pytest.raises(ValueError):
        Interval(2, 0, F(1, 3))
    with pytest.raises(ValueError):
        upsilon_union([Interval(2, 0, F(1, 2)), Interval(2, F(1, 4), 1)])
    assert upsilon_union([Interval(3, F(2, 3), 1), Interval(3, 0, F(1, 3))]) == 3 + (1 - F(3, 2))


def test_enclosing_interval_examples():
    x = DigitStream.parse(",period=01", 2)
    j = enclosing_interval(x, 2)
    assert (j.r, j.s) == (F(1, 4), F(1, 2))
    j = enclosing_interval(x, 1)
    assert (j.r, j.s) == (0, F(1, 2))
    j = enclosing_interval(DigitStream.parse("101,period=01", 2), 3)
    assert (j.r, j.s) == (F(5, 8), F(6, 8))


def test_decay_example_p2():
    x = DigitStream.parse(",period=01", 2)
    j = enclosing_interval(x, 4)
    assert (j.r, j.s - j.r) == (F(5, 16), F(1, 16))
    value = upsilon(j)
    assert value == F(16, 6) - F(16, 5) == F(-8, 15)
    assert padic_abs(value, 2) == UltraNorm(2, 3)
    assert k_digit_formula(x, 4) == 3


def test_decay_example_p3_exact_value():
    x = DigitStream.parse(",period=012", 3)
    j = enclosing_interval(x, 3)
    assert (j.r, j.s) == (F(5, 27), F(6, 27))
    assert padic_abs(upsilon(j), 3) == UltraNorm(3, 2)
    assert k_digit_formula(x, 3) == k_carry_formula(x, 3) == 2


def test_eventually_constant_rejected():
    with pytest.raises(DomainError):
        DigitStream.parse("1,period=0", 2)
    with pytest.raises(DomainError):
        DigitStream(3, (), (2, 2))
    with pytest.raises(ValueError):
        DigitStream.parse("12,period=01", 2)
    with pytest.raises(ValueError):
        DigitStream(4, (), (0, 1))


def test_decay_table_rows_and_skips():
    t = decay_sequence(DigitStream.parse(",period=01", 2), 30)
    assert [r.n for r in t.rows] == list(range(2, 31, 2))
    assert all(reason == "a_n = 0" for _, reason in t.skipped)
    assert [r.k_n for r in t.rows] == [r.n - 1 for r in t.rows]
    assert t.continuity_violated()
    assert t.lower_bound_norm() == UltraNorm.one(2)
    assert t.strictly_decreasing_from() == 0
    t = decay_sequence(DigitStream.parse("11,period=10", 2), 4)
    assert (1, "a_1..a_n = p-1") in t.skipped and (2, "a_1..a_n = p-1") in t.skipped


def test_p3_norms_repeat_in_pairs():
    t = decay_sequence(DigitStream.parse(",period=012", 3), 30)
    ks = [r.k_n for r in t.rows]
    assert ks[:4] == [2, 2, 5, 5]
    assert t.continuity_violated()
    assert t.strictly_decreasing_from() is None


def test_lower_bound_subinterval():
    for p in (2, 3, 5):
        assert padic_abs(upsilon(Interval(p, 0, F(1, p))), p) == UltraNorm(p, 1)
        assert padic_abs(upsilon(Interval(p, F(1, p), 1)), p) == UltraNorm.one(p)
        assert padic_abs(upsilon(Interval(p, 0, 1)), p) == UltraNorm.one(p)


@st.composite
def padic_points(draw, p, k=6):
    return F(draw(st.integers(0, p ** k)), p ** k)


@given(st.sampled_from([2, 3, 5]), st.data())
def test_additivity(p, data):
    r, s, t = sorted(data.draw(st.lists(padic_points(p), min_size=3, max_size=3, unique=True)))
    assert upsilon(Interval(p, r, s)) + upsilon(Interval(p, s, t)) == upsilon(Interval(p, r, t))
    assert upsilon_union([Interval(p, r, s), Interval(p, s, t)]) == upsilon(Interval(p, r, t))


@given(st.sampled_from([2, 3, 5, 7]), st.data())
def test_bounded(p, data):
    r, s = sorted(data.draw(st.lists(padic_points(p, 8), min_size=2, max_size=2, unique=True)))
    assert padic_abs(upsilon(Interval(p, r, s)), p) <= UltraNorm.one(p)


@given(st.sampled_from([2, 3, 5]), st.data())
def test_digit_formula_equivalence(p, data):
    prefix = data.draw(st.lists(st.integers(0, p - 1), max_size=6))
    period = data.draw(st.lists(st.integers(0, p - 1), min_size=2, max_size=5))
    assume(len(set(period)) > 1)
    x = DigitStream(p, tuple(prefix), tuple(period))
    for n in range(1, 31):
        k = k_digit_formula(x, n)
        if k is not None:
            assert k_carry_formula(x, n) == k
    table = decay_sequence(x, 30)
    assert table.continuity_violated() or len(table.rows) < 2 or \
        table.rows[-1].k_n > table.rows[0].k_n
