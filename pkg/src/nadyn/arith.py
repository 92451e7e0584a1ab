"""Exact rationals with prime valuations and exponent-encoded ultrametric norms.

Rationals are plain :class:`fractions.Fraction` values; the prime is always
passed alongside.  Norms never touch floating point: every norm arising here
lies in ``{l**z : z in Z} | {0}`` and is stored as the exponent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]

INFINITY = math.inf

_TRIAL_LIMIT = 1 << 16
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    """Trial division below 2**16, deterministic Miller-Rabin above."""
    if n < 2:
        return False
    if n < _TRIAL_LIMIT:
        if n % 2 == 0:
            return n == 2
        i = 3
        while i * i <= n:
            if n % i == 0:
                return False
            i += 2
        return True
    if n % 2 == 0:
        return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_prime(ell: int) -> int:
    if not isinstance(ell, int) or isinstance(ell, bool) or not is_prime(ell):
        raise ValueError(f"not a prime: {ell!r}")
    return ell


def to_rational(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, str)):
        return Fraction(x.replace("−", "-") if isinstance(x, str) else x)
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def format_rational(x: Fraction) -> str:
    return str(to_rational(x))


def _int_valuation(n: int, ell: int) -> int:
    n = abs(n)
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def valuation(x: RationalLike, ell: int) -> int | float:
    """``v_ell(x)``; returns :data:`INFINITY` exactly when ``x == 0``."""
    check_prime(ell)
    x = to_rational(x)
    if x == 0:
        return INFINITY
    return _int_valuation(x.numerator, ell) - _int_valuation(x.denominator, ell)


@total_ordering
@dataclass(frozen=True, eq=False)
class UltraNorm:
    """The real number ``prime ** (-exponent)``, or 0 when ``exponent is None``."""

    prime: int
    exponent: int | None

    @classmethod
    def zero(cls, prime: int) -> "UltraNorm":
        return cls(prime, None)

    @classmethod
    def one(cls, prime: int) -> "UltraNorm":
        return cls(prime, 0)

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    def _check(self, other: "UltraNorm") -> None:
        if not isinstance(other, UltraNorm):
            raise TypeError("expected UltraNorm")
        if self.prime != other.prime and not (self.is_zero or other.is_zero):
            raise ValueError(f"norms over different primes {self.prime} and {other.prime}")

    def __eq__(self, other):
        if not isinstance(other, UltraNorm):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        return self.prime == other.prime and self.exponent == other.exponent

    def __hash__(self):
        return hash(None) if self.is_zero else hash((self.prime, self.exponent))

    def __lt__(self, other):
        if not isinstance(other, UltraNorm):
            return NotImplemented
        self._check(other)
        if other.is_zero:
            return False
        if self.is_zero:
            return True
        return self.exponent > other.exponent

    def __mul__(self, other):
        if not isinstance(other, UltraNorm):
            return NotImplemented
        self._check(other)
        if self.is_zero or other.is_zero:
            return UltraNorm.zero(self.prime)
        return UltraNorm(self.prime, self.exponent + other.exponent)

    def as_fraction(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.prime) ** (-self.exponent)

    def __float__(self):
        return float(self.as_fraction())

    def to_json(self) -> dict:
        if self.is_zero:
            return {"zero": True}
        return {"prime": self.prime, "exponent": self.exponent}

    @classmethod
    def from_json(cls, data: dict, prime: int | None = None) -> "UltraNorm":
        if data.get("zero"):
            return cls(data.get("prime", prime or 2), None)
        return cls(int(data["prime"]), int(data["exponent"]))

    def __str__(self):
        if self.is_zero:
            return "0"
        if self.exponent == 0:
            return "1"
        return f"{self.prime}^{-self.exponent}"


def padic_abs(x: RationalLike, ell: int) -> UltraNorm:
    v = valuation(x, ell)
    if v == INFINITY:
        return UltraNorm.zero(ell)
    return UltraNorm(ell, v)


def norm_max(norms, prime: int) -> UltraNorm:
    best = UltraNorm.zero(prime)
    for n in norms:
        if n > best:
            best = n
    return best
