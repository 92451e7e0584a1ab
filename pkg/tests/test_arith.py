from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import primes, rationals
from nadyn.arith import (INFINITY, UltraNorm, format_rational, is_prime,
                         padic_abs, to_rational, valuation)


@pytest.mark.parametrize("x, ell, expected", [
    (5, 5, 1),
    (-2, 3, 0),
    (Fraction(9, 2), 3, 2),
    (Fraction(2, 9), 3, -2),
    (0, 7, INFINITY),
])
def test_valuation(x, ell, expected):
    assert valuation(x, ell) == expected


def test_valuation_rejects_composite():
    with pytest.raises(ValueError):
        valuation(4, 6)
    with pytest.raises(ValueError):
        padic_abs(1, 1)


def test_abs_examples():
    assert padic_abs(5, 5) == UltraNorm(5, 1)
    assert padic_abs(5, 5).as_fraction() == Fraction(1, 5)
    assert padic_abs(0, 7).is_zero
    assert padic_abs(-2, 3) == UltraNorm.one(3)


def test_field_ops_and_strict_ultrametric_instance():
    assert to_rational(-2) + 3 == 1
    assert to_rational(-2) * -2 == 4
    third, two_thirds = Fraction(1, 3), Fraction(2, 3)
    assert padic_abs(third + two_thirds, 3) == UltraNorm.one(3)
    assert max(padic_abs(third, 3), padic_abs(two_thirds, 3)) == UltraNorm(3, -1)
    with pytest.raises(ZeroDivisionError):
        Fraction(1) / to_rational(0)


def test_serialization():
    assert format_rational(Fraction(-2)) == "-2"
    assert format_rational(Fraction(1, 3)) == "1/3"
    assert to_rational("−2") == -2
    assert UltraNorm(3, 2).to_json() == {"prime": 3, "exponent": 2}
    assert UltraNorm.zero(3).to_json() == {"zero": True}
    assert UltraNorm.from_json({"prime": 3, "exponent": 2}) == UltraNorm(3, 2)


def test_primality():
    small = [n for n in range(100) if is_prime(n)]
    assert small == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59,
                     61, 67, 71, 73, 79, 83, 89, 97]
    assert is_prime(65537) and is_prime(2 ** 61 - 1)
    assert not is_prime(65537 * 65539) and not is_prime(3215031751)


@given(rationals, rationals, primes)
def test_ultrametric_and_multiplicative(x, y, ell):
    ax, ay = padic_abs(x, ell), padic_abs(y, ell)
    assert padic_abs(x * y, ell) == ax * ay
    assert padic_abs(x + y, ell) <= max(ax, ay)
    if ax != ay:
        assert padic_abs(x + y, ell) == max(ax, ay)


@given(rationals, rationals, primes)
def test_valuation_additive(x, y, ell):
    assert valuation(x * y, ell) == valuation(x, ell) + valuation(y, ell)


@given(st.integers(-20, 20), st.integers(-20, 20), primes)
def test_ultranorm_matches_exact_powers(e1, e2, ell):
    a, b = UltraNorm(ell, e1), UltraNorm(ell, e2)
    fa, fb = Fraction(ell) ** -e1, Fraction(ell) ** -e2
    assert (a * b).as_fraction() == fa * fb
    assert (a < b) == (fa < fb)
    assert (a == b) == (fa == fb)
    assert UltraNorm.zero(ell) < a


@given(rationals)
def test_normalization_idempotent(x):
    assert to_rational(to_rational(x)) == x
    assert x.denominator > 0
