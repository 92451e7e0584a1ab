"""Non-Archimedean valued measures: Bernoulli (and Haar) on the full shift,
weighted counting measures on finite sets.

Both families expose the same small interface (``measure``, ``norm``,
``point_norm``, ``full``, ``random_set``), which is what the rest of the
package calls a measure context.  Bernoulli sets are :class:`ClopenSet`;
counting-measure sets are frozensets of labels.
"""
from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction
from typing import Iterable, Sequence

from .arith import (INFINITY, UltraNorm, check_prime, format_rational,
                    padic_abs, to_rational, valuation)
from .errors import ResourceError
from .report import Report
from .shift import (ClopenSet, PointWord, check_alphabet, int_to_word,
                    random_clopen, random_point, word_to_int)

MAX_VERIFY_DEPTH = 10
MAX_COUNTING_SET = 20


class BernoulliMeasure:
    """``mu(U_w) = prod(q[w_i])`` on cylinders, with weights summing to 1
    and every ``|q_i|_l <= 1``."""

    kind = "bernoulli"

    def __init__(self, p: int, value_prime: int, weights: Sequence):
        self.p = check_alphabet(p)
        self.value_prime = check_prime(value_prime)
        self.weights = tuple(to_rational(q) for q in weights)
        if len(self.weights) != p:
            raise ValueError(f"expected {p} weights, got {len(self.weights)}")
        if sum(self.weights) != 1:
            raise ValueError(f"weights sum to {sum(self.weights)}, not 1")
        self.weight_valuations = tuple(valuation(q, value_prime) for q in self.weights)
        for q, v in zip(self.weights, self.weight_valuations):
            if v < 0:
                raise ValueError(f"weight {q} has |q|_{value_prime} > 1")
        self._stats: dict[ClopenSet, Counter] = {}

    def __repr__(self):
        ws = ", ".join(format_rational(q) for q in self.weights)
        return f"{type(self).__name__}(p={self.p}, l={self.value_prime}, q=({ws}))"

    def full(self) -> ClopenSet:
        return ClopenSet.full(self.p)

    def empty(self) -> ClopenSet:
        return ClopenSet.empty(self.p)

    def _check(self, a: ClopenSet) -> None:
        if not isinstance(a, ClopenSet) or a.p != self.p:
            raise ValueError(f"set is not over the {self.p}-symbol alphabet")

    def _symbol_counts(self, a: ClopenSet) -> Counter:
        # multiplicity of each symbol-count vector among the words of ``a``
        stats = self._stats.get(a)
        if stats is None:
            stats = Counter()
            p, n = self.p, a.depth
            for w in a.words:
                counts = [0] * p
                for _ in range(n):
                    w, s = divmod(w, p)
                    counts[s] += 1
                stats[tuple(counts)] += 1
            self._stats[a] = stats
        return stats

    def cylinder_measure(self, word: Sequence[int]) -> Fraction:
        out = Fraction(1)
        for s in word:
            out *= self.weights[s]
        return out

    def measure(self, a: ClopenSet) -> Fraction:
        self._check(a)
        total = Fraction(0)
        for counts, mult in self._symbol_counts(a).items():
            term = Fraction(mult)
            for q, c in zip(self.weights, counts):
                if c:
                    term *= q ** c
            total += term
        return total

    def norm(self, a: ClopenSet) -> UltraNorm:
        # max over cylinders of |mu(U_w)|; valid since max_i |q_i| = 1
        self._check(a)
        best = INFINITY
        for counts in self._symbol_counts(a):
            v = sum(c * vs for c, vs in zip(counts, self.weight_valuations) if c)
            best = min(best, v)
        if best == INFINITY:
            return UltraNorm.zero(self.value_prime)
        return UltraNorm(self.value_prime, int(best))

    def point_norm(self, x: PointWord) -> UltraNorm:
        if x.p != self.p:
            raise ValueError("alphabet mismatch")
        vs = self.weight_valuations
        if any(vs[s] > 0 for s in x.period):
            return UltraNorm.zero(self.value_prime)
        return UltraNorm(self.value_prime, int(sum(vs[s] for s in x.preperiod)))

    def random_set(self, rng: random.Random, depth: int) -> ClopenSet:
        return random_clopen(rng, self.p, depth)

    def to_json(self) -> dict:
        return {"kind": "bernoulli", "p": self.p, "value_prime": self.value_prime,
                "weights": [format_rational(q) for q in self.weights]}


class HaarMeasure(BernoulliMeasure):
    """Uniform weights ``1/p``; the value prime must differ from ``p``."""

    kind = "haar"

    def __init__(self, p: int, value_prime: int):
        if p == value_prime:
            raise ValueError("Haar measure needs a value prime different from p")
        super().__init__(p, value_prime, [Fraction(1, p)] * p)

    def __repr__(self):
        return f"HaarMeasure(p={self.p}, l={self.value_prime})"

    def to_json(self) -> dict:
        return {"kind": "haar", "p": self.p, "value_prime": self.value_prime}


class CountingMeasure:
    """``kappa(A) = sum(h(a) for a in A)`` on all subsets of a finite set."""

    kind = "counting"

    def __init__(self, labels: Sequence, h: Sequence, value_prime: int):
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate labels")
        self.h = dict(zip(self.labels, (to_rational(v) for v in h)))
        if len(self.h) != len(h):
            raise ValueError("labels and h have different lengths")
        self.value_prime = check_prime(value_prime)

    def __repr__(self):
        return f"CountingMeasure({self.h!r}, l={self.value_prime})"

    def full(self) -> frozenset:
        return frozenset(self.labels)

    def empty(self) -> frozenset:
        return frozenset()

    def _check(self, a) -> frozenset:
        a = frozenset(a)
        extra = a - self.full()
        if extra:
            raise ValueError(f"labels not in the ground set: {sorted(map(str, extra))}")
        return a

    def measure(self, a: Iterable) -> Fraction:
        return sum((self.h[x] for x in self._check(a)), Fraction(0))

    def norm(self, a: Iterable) -> UltraNorm:
        return counting_norm(self, a)

    def point_norm(self, x) -> UltraNorm:
        return counting_norm(self, [x])

    def random_set(self, rng: random.Random, depth: int = 0) -> frozenset:
        return frozenset(x for x in self.labels if rng.random() < 0.5)

    def to_json(self) -> dict:
        return {"kind": "counting", "labels": list(self.labels),
                "h": [format_rational(self.h[x]) for x in self.labels],
                "value_prime": self.value_prime}


def counting_norm(m: CountingMeasure, a: Iterable) -> UltraNorm:
    """Exhaustive ``max |kappa(B)|`` over all ``B`` contained in ``a``."""
    a = m._check(a)
    if len(a) > MAX_COUNTING_SET:
        raise ResourceError(f"{len(a)} labels exceed the brute-force limit {MAX_COUNTING_SET}")
    sums = [Fraction(0)]
    for x in a:
        hx = m.h[x]
        sums += [s + hx for s in sums]
    best = UltraNorm.zero(m.value_prime)
    for s in sums:
        n = padic_abs(s, m.value_prime)
        if n > best:
            best = n
    return best


def load_measure(data: dict):
    kind = data.get("kind")
    if kind == "bernoulli":
        return BernoulliMeasure(int(data["p"]), int(data["value_prime"]), data["weights"])
    if kind == "haar":
        return HaarMeasure(int(data["p"]), int(data["value_prime"]))
    if kind == "counting":
        labels = data.get("labels") or [str(i) for i in range(len(data["h"]))]
        return CountingMeasure(labels, data["h"], int(data["value_prime"]))
    raise ValueError(f"unknown measure kind {kind!r}")


def measure_of(m, a) -> Fraction:
    return m.measure(a)


def norm_of(m, a) -> UltraNorm:
    return m.norm(a)


def point_norm(m, x) -> UltraNorm:
    return m.point_norm(x)


def is_negligible(m, a) -> bool:
    return m.norm(a).is_zero


def _is_empty(s) -> bool:
    return s.is_empty if isinstance(s, ClopenSet) else not s


def _subset(a, b) -> bool:
    return _is_empty(a - b)


def verify_measure_axioms(m, depth: int = 6, seed: int = 0, samples: int = 200) -> Report:
    """Randomized and exhaustive finite-depth checks of the measure axioms.

    Additivity, boundedness with the monotone/convex/minimum norm laws, a
    chain proxy for continuity, and splitting of a set into its atoms.
    """
    if depth > MAX_VERIFY_DEPTH:
        raise ResourceError(f"depth {depth} exceeds the verification limit {MAX_VERIFY_DEPTH}")
    rng = random.Random(seed)
    rep = Report(f"measure axioms for {m!r} at depth {depth}")
    rnd = lambda: m.random_set(rng, depth)  # noqa: E731

    bad = None
    for _ in range(samples):
        a, b = rnd(), rnd()
        b = b - a
        if m.measure(a | b) != m.measure(a) + m.measure(b):
            bad = (a, b)
            break
    rep.add("additivity", bad is None, samples, witness=bad)

    full_norm = m.norm(m.full())
    bad = None
    for _ in range(samples):
        a = rnd()
        if not padic_abs(m.measure(a), m.value_prime) <= full_norm:
            bad = a
            break
    rep.add("bounded", bad is None, samples, detail=f"||X|| = {full_norm}", witness=bad)

    bad = None
    for _ in range(samples):
        b = rnd()
        a = b & rnd()
        if not (_subset(a, b) and m.norm(a) <= m.norm(b)):
            bad = (a, b)
            break
    rep.add("monotone", bad is None, samples, witness=bad)

    bad_convex = bad_min = None
    for _ in range(samples):
        a, b = rnd(), rnd()
        na, nb = m.norm(a), m.norm(b)
        if bad_convex is None and not m.norm(a | b) <= max(na, nb):
            bad_convex = (a, b)
        if bad_min is None and not m.norm(a & b) <= min(na, nb):
            bad_min = (a, b)
    rep.add("convex", bad_convex is None, samples, witness=bad_convex)
    rep.add("minimum", bad_min is None, samples, witness=bad_min)

    if isinstance(m, BernoulliMeasure):
        _continuity_proxy(m, rep, rng, depth, samples)
        _atom_split_bernoulli(m, rep, depth)
    else:
        rep.add("continuity proxy", True, 0, detail="finite ground set")
        bad = None
        for _ in range(samples):
            a = rnd()
            if m.measure(a) != sum((m.measure([x]) for x in a), Fraction(0)):
                bad = a
                break
        rep.add("atom splitting", bad is None, samples, witness=bad)
    return rep


def _continuity_proxy(m: BernoulliMeasure, rep: Report, rng, depth, samples) -> None:
    small = [s for s, v in enumerate(m.weight_valuations) if v > 0]
    if not small:
        rep.add("continuity proxy", True, 0, detail="no negligible eventually periodic points")
        return
    bad = None
    for _ in range(samples):
        x = random_point(rng, m.p)
        if not any(s in small for s in x.period):
            per = list(x.period)
            per[rng.randrange(len(per))] = rng.choice(small)
            x = PointWord(m.p, x.preperiod, tuple(per))
        start, step = len(x.preperiod), len(x.period)
        horizon = start + step * max(2, depth // step + 1)
        norms = [m.norm(ClopenSet.make(m.p, n, [word_to_int(x.prefix(n), m.p)]))
                 for n in range(horizon + 1)]
        monotone = all(b <= a for a, b in zip(norms, norms[1:]))
        marks = norms[start::step]
        decreasing = all(b < a for a, b in zip(marks, marks[1:]))
        if not (monotone and decreasing and m.point_norm(x).is_zero):
            bad = str(x)
            break
    rep.add("continuity proxy", bad is None, samples,
            detail="cylinder-chain norms decrease to 0 along negligible points", witness=bad)


def _atom_split_bernoulli(m: BernoulliMeasure, rep: Report, depth: int) -> None:
    p = m.p
    bad = None
    cases = 0
    for d in range(depth):
        for w in range(p ** d):
            k = depth - d
            kids = range(w * p ** k, (w + 1) * p ** k)
            total = sum((m.cylinder_measure(int_to_word(c, depth, p)) for c in kids), Fraction(0))
            cases += 1
            if total != m.cylinder_measure(int_to_word(w, d, p)):
                bad = int_to_word(w, d, p)
                break
        if bad is not None:
            break
    rep.add("countable additivity instance", bad is None, cases,
            detail=f"cylinders split into all depth-{depth} subcylinders", witness=bad)
