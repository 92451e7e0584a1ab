"""Clopen subsets of the one-sided full shift on ``p`` symbols.

A clopen set is stored as a depth ``n`` and the set of length-``n`` words
whose cylinders it is the union of.  Internally a word is an integer: the
word ``a_0 ... a_{n-1}`` is ``sum(a_i * p**(n-1-i))``, so the parent of a
word is ``w // p`` and prepending a block of ``k`` symbols is
``block * p**n + w``.
"""
from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"
MAX_ALPHABET = len(DIGITS)

Word = tuple  # tuple[int, ...]


def check_alphabet(p: int) -> int:
    if not isinstance(p, int) or p < 2 or p > MAX_ALPHABET:
        raise ValueError(f"alphabet size must be in [2, {MAX_ALPHABET}], got {p!r}")
    return p


def check_word(word: Sequence[int], p: int) -> Word:
    word = tuple(word)
    for a in word:
        if not isinstance(a, int) or not 0 <= a < p:
            raise ValueError(f"symbol {a!r} out of range for alphabet size {p}")
    return word


def parse_word(text: str, p: int) -> Word:
    out = []
    for ch in text.strip():
        i = DIGITS.find(ch.lower())
        if i < 0 or i >= p:
            raise ValueError(f"digit {ch!r} is not a base-{p} symbol")
        out.append(i)
    return tuple(out)


def format_word(word: Sequence[int]) -> str:
    return "".join(DIGITS[a] for a in word)


def word_to_int(word: Sequence[int], p: int) -> int:
    v = 0
    for a in word:
        v = v * p + a
    return v


def int_to_word(v: int, n: int, p: int) -> Word:
    out = [0] * n
    for i in range(n - 1, -1, -1):
        v, out[i] = divmod(v, p)
    return tuple(out)


def _collapse(p: int, depth: int, words: frozenset) -> tuple[int, frozenset]:
    while depth > 0:
        groups: dict[int, int] = defaultdict(int)
        for w in words:
            groups[w // p] += 1
        if any(c != p for c in groups.values()):
            break
        words = frozenset(groups)
        depth -= 1
    return depth, words


@dataclass(frozen=True)
class ClopenSet:
    """Finite union of depth-``depth`` cylinders, kept at minimal depth."""

    p: int
    depth: int
    words: frozenset

    @classmethod
    def make(cls, p: int, depth: int, words: Iterable[int]) -> "ClopenSet":
        words = frozenset(words)
        if not words:
            return cls(p, 0, frozenset())
        d, w = _collapse(p, depth, words)
        return cls(p, d, w)

    @classmethod
    def from_words(cls, p: int, words: Iterable[Sequence[int]]) -> "ClopenSet":
        """Union of the cylinders of ``words`` (which may have mixed lengths)."""
        words = [check_word(w, p) for w in words]
        if not words:
            return cls.empty(p)
        n = max(len(w) for w in words)
        out = set()
        for w in words:
            k = n - len(w)
            base = word_to_int(w, p) * p ** k
            out.update(range(base, base + p ** k))
        return cls.make(p, n, out)

    @classmethod
    def full(cls, p: int) -> "ClopenSet":
        return cls(check_alphabet(p), 0, frozenset([0]))

    @classmethod
    def empty(cls, p: int) -> "ClopenSet":
        return cls(check_alphabet(p), 0, frozenset())

    @property
    def is_empty(self) -> bool:
        return not self.words

    @property
    def is_full(self) -> bool:
        return self.depth == 0 and bool(self.words)

    def refine(self, n: int) -> frozenset:
        """Word integers of the same set at depth ``n >= depth``."""
        if n < self.depth:
            raise ValueError(f"cannot refine depth-{self.depth} set to depth {n}")
        k = n - self.depth
        if k == 0:
            return self.words
        m = self.p ** k
        return frozenset(w * m + j for w in self.words for j in range(m))

    def word_tuples(self, n: int | None = None) -> list[Word]:
        n = self.depth if n is None else n
        return [int_to_word(w, n, self.p) for w in sorted(self.refine(n))]

    def cylinders(self) -> list[Word]:
        """Maximal cylinders whose disjoint union is this set."""
        out = []
        level = set(self.words)
        d = self.depth
        while d >= 0 and level:
            groups = defaultdict(list)
            for w in level:
                groups[w // self.p].append(w)
            nxt = set()
            for parent, kids in groups.items():
                if len(kids) == self.p and d > 0:
                    nxt.add(parent)
                else:
                    out.extend(int_to_word(w, d, self.p) for w in kids)
            level = nxt
            d -= 1
        return sorted(out, key=lambda w: (len(w), w))

    def _binop(self, other: "ClopenSet", op) -> "ClopenSet":
        if not isinstance(other, ClopenSet):
            return NotImplemented
        if other.p != self.p:
            raise ValueError(f"alphabet mismatch: {self.p} vs {other.p}")
        n = max(self.depth, other.depth)
        return ClopenSet.make(self.p, n, op(self.refine(n), other.refine(n)))

    def __or__(self, other):
        return self._binop(other, frozenset.__or__)

    def __and__(self, other):
        return self._binop(other, frozenset.__and__)

    def __sub__(self, other):
        return self._binop(other, frozenset.__sub__)

    def __xor__(self, other):
        return self._binop(other, frozenset.__xor__)

    def complement(self) -> "ClopenSet":
        return ClopenSet.full(self.p) - self

    def __invert__(self):
        return self.complement()

    def issubset(self, other: "ClopenSet") -> bool:
        return (self - other).is_empty

    def isdisjoint(self, other: "ClopenSet") -> bool:
        return (self & other).is_empty

    def count_at(self, n: int) -> int:
        if n < self.depth:
            raise ValueError("depth below canonical depth")
        return len(self.words) * self.p ** (n - self.depth)

    def sort_key(self):
        return (self.depth, tuple(sorted(self.words)))

    def to_json(self) -> dict:
        return {"p": self.p, "depth": self.depth,
                "words": [format_word(w) for w in self.word_tuples()]}

    @classmethod
    def from_json(cls, data: dict) -> "ClopenSet":
        p = check_alphabet(int(data["p"]))
        depth = int(data["depth"])
        words = []
        for s in data["words"]:
            w = parse_word(s, p)
            if len(w) != depth:
                raise ValueError(f"word {s!r} does not have length {depth}")
            words.append(word_to_int(w, p))
        return cls.make(p, depth, words)

    def to_expr(self) -> str:
        if self.is_empty:
            return "EMPTY"
        if self.is_full:
            return "ALL"
        return " + ".join("U:" + format_word(w) for w in self.word_tuples())

    def __repr__(self):
        return f"ClopenSet(p={self.p}, {self.to_expr()})"


def cylinder(word: Sequence[int], p: int) -> ClopenSet:
    check_alphabet(p)
    word = check_word(word, p)
    return ClopenSet.make(p, len(word), [word_to_int(word, p)])


def boolean_op(kind: str, a: ClopenSet, b: ClopenSet) -> ClopenSet:
    if kind == "union":
        return a | b
    if kind == "intersection":
        return a & b
    if kind == "difference":
        return a - b
    raise ValueError(f"unknown boolean operation {kind!r}")


def refine_to_depth(a: ClopenSet, n: int) -> set[Word]:
    return set(a.word_tuples(n))


def shift_preimage(a: ClopenSet, k: int = 1) -> ClopenSet:
    """``sigma^{-k}(A)``: prepend every block of ``k`` symbols."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if a.is_empty:
        return a
    m = a.p ** a.depth
    words = [tau * m + w for tau in range(a.p ** k) for w in a.words]
    return ClopenSet.make(a.p, a.depth + k, words)


def shift_image(a: ClopenSet) -> ClopenSet:
    if a.is_empty:
        return a
    n = max(a.depth, 1)
    m = a.p ** (n - 1)
    return ClopenSet.make(a.p, n - 1, {w % m for w in a.refine(n)})


@dataclass(frozen=True)
class PointWord:
    """The eventually periodic infinite word ``preperiod + period**inf``."""

    p: int
    preperiod: Word
    period: Word

    def __post_init__(self):
        check_alphabet(self.p)
        pre = check_word(self.preperiod, self.p)
        per = check_word(self.period, self.p)
        if not per:
            raise ValueError("period must be nonempty")
        n = len(per)
        for d in range(1, n + 1):
            if n % d == 0 and per[:d] * (n // d) == per:
                per = per[:d]
                break
        while pre and pre[-1] == per[-1]:
            per = per[-1:] + per[:-1]
            pre = pre[:-1]
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    @classmethod
    def parse(cls, text: str, p: int) -> "PointWord":
        """``PRE:PER`` with base-``p`` digits; ``PRE`` may be empty."""
        if ":" not in text:
            raise ValueError(f"point must look like PRE:PER, got {text!r}")
        pre, per = text.split(":", 1)
        return cls(p, parse_word(pre, p), parse_word(per, p))

    def symbol(self, i: int) -> int:
        if i < len(self.preperiod):
            return self.preperiod[i]
        return self.period[(i - len(self.preperiod)) % len(self.period)]

    def prefix(self, n: int) -> Word:
        return tuple(self.symbol(i) for i in range(n))

    def shifted(self) -> "PointWord":
        if self.preperiod:
            return PointWord(self.p, self.preperiod[1:], self.period)
        return PointWord(self.p, (), self.period[1:] + self.period[:1])

    def __str__(self):
        return f"{format_word(self.preperiod)}:{format_word(self.period)}"


def contains_point(a: ClopenSet, x: PointWord) -> bool:
    if a.p != x.p:
        raise ValueError("alphabet mismatch")
    return word_to_int(x.prefix(a.depth), a.p) in a.words


def random_clopen(rng: random.Random, p: int, max_depth: int, density: float = 0.5) -> ClopenSet:
    d = rng.randint(0, max_depth)
    return ClopenSet.make(p, d, [w for w in range(p ** d) if rng.random() < density])


def random_point(rng: random.Random, p: int, max_pre: int = 4, max_per: int = 4) -> PointWord:
    pre = tuple(rng.randrange(p) for _ in range(rng.randint(0, max_pre)))
    per = tuple(rng.randrange(p) for _ in range(rng.randint(1, max_per)))
    return PointWord(p, pre, per)
