"""The additive, bounded but discontinuous set function ``upsilon`` on the
interval algebra of ``X_p = [0, 1]`` minus the ``p``-adic rationals.

``upsilon(J_{r,s}) = 1/s - 1/r`` (``1/s`` when ``r = 0``).  Along the
nested intervals ``J_n(x)`` around any ``x`` in ``X_p`` its ``p``-adic
absolute value tends to 0, so every point is negligible although
``upsilon(X_p) = 1``.  Deliberately not a measure context.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import UltraNorm, check_prime, padic_abs, to_rational, valuation
from .errors import DomainError, VerificationError
from .shift import DIGITS, parse_word

log = logging.getLogger(__name__)


def _is_padic_rational(x: Fraction, p: int) -> bool:
    d = x.denominator
    while d % p == 0:
        d //= p
    return d == 1


@dataclass(frozen=True)
class DigitStream:
    """Base-``p`` expansion ``0.a_1 a_2 ...`` given as prefix plus period."""

    p: int
    prefix: tuple
    period: tuple

    def __post_init__(self):
        check_prime(self.p)
        for a in self.prefix + self.period:
            if not 0 <= a < self.p:
                raise ValueError(f"digit {a} out of range for base {self.p}")
        if len(set(self.period)) < 2:
            raise DomainError("digits are eventually constant; the point is not in X_p")

    @classmethod
    def parse(cls, text: str, p: int) -> "DigitStream":
        """``PREFIX,period=PERIOD`` (prefix may be empty)."""
        prefix, _, rest = text.partition(",")
        if not rest.startswith("period="):
            raise ValueError(f"expected PREFIX,period=DIGITS, got {text!r}")
        return cls(p, parse_word(prefix, p), parse_word(rest[len("period="):], p))

    def digit(self, i: int) -> int:
        """``a_i`` for ``i >= 1``."""
        if i < 1:
            raise ValueError("digits are indexed from 1")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        return self.period[(i - 1 - len(self.prefix)) % len(self.period)]

    def digits(self, n: int) -> list[int]:
        return [self.digit(i) for i in range(1, n + 1)]

    def __str__(self):
        fmt = lambda w: "".join(DIGITS[a] for a in w)  # noqa: E731
        return f"{fmt(self.prefix)},period={fmt(self.period)}"


@dataclass(frozen=True)
class Interval:
    """``J_{r,s}``: the open interval ``(r, s)`` with the ``p``-adic rationals removed."""

    p: int
    r: Fraction
    s: Fraction

    def __post_init__(self):
        r, s = to_rational(self.r), to_rational(self.s)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", s)
        if r == s:
            raise ValueError("empty interval: r == s")
        if not 0 <= r < s <= 1:
            raise ValueError(f"need 0 <= r < s <= 1, got r={r}, s={s}")
        for x in (r, s):
            if not _is_padic_rational(x, self.p):
                raise ValueError(f"endpoint {x} is not of the form n/{self.p}^k")


def upsilon(j: Interval) -> Fraction:
    if j.r == 0:
        return 1 / j.s
    return 1 / j.s - 1 / j.r


def upsilon_union(intervals: Sequence[Interval]) -> Fraction:
    """Value on a finite disjoint union of intervals."""
    ordered = sorted(intervals, key=lambda j: j.r)
    for a, b in zip(ordered, ordered[1:]):
        if b.r < a.s:
            raise ValueError(f"intervals ({a.r}, {a.s}) and ({b.r}, {b.s}) overlap")
    return sum((upsilon(j) for j in ordered), Fraction(0))


def enclosing_interval(x: DigitStream, n: int) -> Interval:
    """``J_n(x) = (r, r + p^-n)`` with ``r`` the ``n``-digit truncation."""
    if n < 1:
        raise ValueError("n must be >= 1")
    r = sum((Fraction(a, x.p ** i) for i, a in enumerate(x.digits(n), start=1)), Fraction(0))
    return Interval(x.p, r, r + Fraction(1, x.p ** n))


def k_digit_formula(x: DigitStream, n: int) -> int | None:
    """``max{k <= n : a_k != p - 1}``, or None when no such ``k`` exists."""
    for k in range(n, 0, -1):
        if x.digit(k) != x.p - 1:
            return k
    return None


def k_carry_formula(x: DigitStream, n: int) -> int:
    """``n - v_p(1 + sum a_i p^(n-i))``: the same quantity by exact arithmetic."""
    total = 1 + sum(a * x.p ** (n - i) for i, a in enumerate(x.digits(n), start=1))
    return n - int(valuation(total, x.p))


@dataclass(frozen=True)
class DecayRow:
    n: int
    k_n: int
    value: Fraction
    norm: UltraNorm


@dataclass
class DecayTable:
    x: DigitStream
    rows: list
    skipped: list

    @property
    def norms(self) -> list[UltraNorm]:
        return [r.norm for r in self.rows]

    def lower_bound_norm(self) -> UltraNorm:
        """``||X_p|| >= |upsilon(J_{0,1})|_p``, which is 1."""
        return padic_abs(upsilon(Interval(self.x.p, Fraction(0), Fraction(1))), self.x.p)

    def continuity_violated(self) -> bool:
        ks = [r.k_n for r in self.rows]
        if len(ks) < 2:
            return False
        tending_to_zero = all(b >= a for a, b in zip(ks, ks[1:])) and ks[-1] > ks[0]
        return tending_to_zero and not self.lower_bound_norm().is_zero

    def strictly_decreasing_from(self) -> int | None:
        """Smallest row index after which the norms decrease strictly, if any
        row pair is left to check; None when the last pair is not strict."""
        norms = self.norms
        start = len(norms) - 1
        while start > 0 and norms[start] < norms[start - 1]:
            start -= 1
        return start if start < len(norms) - 1 else None


def decay_sequence(x: DigitStream, n_max: int) -> DecayTable:
    """``|upsilon(J_n(x))|_p`` for ``n <= n_max`` with ``a_n != 0``, each
    checked against ``p^-k_n`` from the digit formula."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    rows, skipped = [], []
    for n in range(1, n_max + 1):
        if x.digit(n) == 0:
            skipped.append((n, "a_n = 0"))
            continue
        k = k_digit_formula(x, n)
        if k is None:
            log.info("skipping n=%d: a_1..a_n all equal p-1", n)
            skipped.append((n, "a_1..a_n = p-1"))
            continue
        value = upsilon(enclosing_interval(x, n))
        norm = padic_abs(value, x.p)
        if norm != UltraNorm(x.p, k) or k_carry_formula(x, n) != k:
            raise VerificationError(
                f"n={n}: |upsilon(J_n)|_p = {norm} but digit formula gives {x.p}^{-k}",
                witness=(n, value))
        rows.append(DecayRow(n, k, value, norm))
    return DecayTable(x, rows, skipped)
