"""Step functions, integration, the step-function seminorm and the
composition operators ``U_T``."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .arith import UltraNorm, format_rational, padic_abs, to_rational
from .errors import NeedsMoreDepth
from .report import Report
from .shift import ClopenSet, PointWord, check_alphabet, contains_point, int_to_word
from .transform import MeasureAlgebraIso


@dataclass(frozen=True)
class StepFunction:
    """``sum(c * chi_A for c, A in terms)`` with disjoint nonempty supports
    and distinct nonzero coefficients (so the form is unique)."""

    p: int
    terms: tuple

    @classmethod
    def from_terms(cls, p: int, terms: Iterable) -> "StepFunction":
        return canonicalize(p, terms)

    @classmethod
    def zero(cls, p: int) -> "StepFunction":
        return cls(check_alphabet(p), ())

    @classmethod
    def indicator(cls, a: ClopenSet) -> "StepFunction":
        return canonicalize(a.p, [(1, a)])

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def depth(self) -> int:
        return max((a.depth for _, a in self.terms), default=0)

    def values_at(self, n: int) -> dict:
        """Word integer at depth ``n`` -> value, for words where nonzero."""
        out = {}
        for c, a in self.terms:
            for w in a.refine(n):
                out[w] = c
        return out

    def __call__(self, x: PointWord) -> Fraction:
        for c, a in self.terms:
            if contains_point(a, x):
                return c
        return Fraction(0)

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return canonicalize(self.p, list(self.terms) + list(other.terms))

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "StepFunction":
        c = to_rational(c)
        return canonicalize(self.p, [(c * a, s) for a, s in self.terms])

    def __mul__(self, other: "StepFunction") -> "StepFunction":
        if not isinstance(other, StepFunction):
            return self.scale(other)
        if other.p != self.p:
            raise ValueError("alphabet mismatch")
        n = max(self.depth, other.depth)
        u, v = self.values_at(n), other.values_at(n)
        return _from_values(self.p, n, {w: u[w] * v[w] for w in u.keys() & v.keys()})

    def support(self) -> ClopenSet:
        out = ClopenSet.empty(self.p)
        for _, a in self.terms:
            out = out | a
        return out

    def to_json(self) -> dict:
        return {"terms": [{"coeff": format_rational(c), "set": a.to_json()} for c, a in self.terms]}

    @classmethod
    def from_json(cls, data: dict, p: int | None = None) -> "StepFunction":
        terms = [(to_rational(t["coeff"]), ClopenSet.from_json(t["set"])) for t in data["terms"]]
        ps = {a.p for _, a in terms}
        if p is not None:
            ps.add(p)
        if len(ps) > 1:
            raise ValueError("terms over different alphabets")
        if not ps:
            raise ValueError("cannot infer the alphabet of an empty step function")
        return canonicalize(ps.pop(), terms)

    def __repr__(self):
        body = " + ".join(f"{format_rational(c)}*chi[{a.to_expr()}]" for c, a in self.terms)
        return f"StepFunction({body or '0'})"


def _from_values(p: int, n: int, values: dict) -> StepFunction:
    groups = defaultdict(list)
    for w, c in values.items():
        if c != 0:
            groups[c].append(w)
    terms = [(c, ClopenSet.make(p, n, ws)) for c, ws in groups.items()]
    terms.sort(key=lambda t: t[1].sort_key())
    return StepFunction(p, tuple(terms))


def canonicalize(p: int, terms: Iterable) -> StepFunction:
    terms = [(to_rational(c), a) for c, a in terms]
    for _, a in terms:
        if a.p != p:
            raise ValueError(f"support over alphabet {a.p}, expected {p}")
    n = max((a.depth for _, a in terms), default=0)
    values = defaultdict(Fraction)
    for c, a in terms:
        for w in a.refine(n):
            values[w] += c
    return _from_values(p, n, values)


def integrate(m, f: StepFunction) -> Fraction:
    return sum((c * m.measure(a) for c, a in f.terms), Fraction(0))


def step_norm(m, f: StepFunction) -> UltraNorm:
    """``max |c| * ||A||`` over the disjoint terms."""
    best = UltraNorm.zero(m.value_prime)
    for c, a in f.terms:
        n = padic_abs(c, m.value_prime) * m.norm(a)
        if n > best:
            best = n
    return best


def compose_with_transformation(f: StepFunction, t) -> StepFunction:
    """``U_T f = f o T``, using ``chi_A o T = chi_{T^-1 A}``."""
    return canonicalize(f.p, [(c, t.preimage(a)) for c, a in f.terms])


def u_phi(f: StepFunction, phi: MeasureAlgebraIso) -> StepFunction:
    return canonicalize(f.p, [(c, phi(a)) for c, a in f.terms])


class LinearOnSteps:
    """A linear map on step functions fixed by its values on cylinders of
    depth ``<= depth``."""

    def __init__(self, p: int, depth: int, images: dict):
        self.p = check_alphabet(p)
        self.depth = depth
        self.images = dict(images)
        for n in range(depth + 1):
            for w in range(p ** n):
                if (n, w) not in self.images:
                    raise ValueError(f"missing image for cylinder ({n}, {w})")

    def on_cylinder(self, n: int, w: int) -> StepFunction:
        return self.images[(n, w)]

    def __call__(self, f: StepFunction) -> StepFunction:
        out = StepFunction.zero(self.p)
        for c, a in f.terms:
            if a.depth > self.depth:
                raise NeedsMoreDepth(f"support depth {a.depth} beyond {self.depth}")
            for w in a.words:
                out = out + self.images[(a.depth, w)].scale(c)
        return out

    @classmethod
    def from_iso(cls, phi: MeasureAlgebraIso) -> "LinearOnSteps":
        return cls(phi.p, phi.depth,
                   {k: StepFunction.indicator(img) for k, img in phi.images.items()})

    def to_json(self) -> dict:
        rows = []
        for (n, w), f in sorted(self.images.items()):
            rows.append({"word": "".join(map(str, int_to_word(w, n, self.p))), "image": f.to_json()})
        return {"p": self.p, "depth": self.depth, "images": rows}

    @classmethod
    def from_json(cls, data: dict) -> "LinearOnSteps":
        from .shift import parse_word, word_to_int
        p = int(data["p"])
        images = {}
        for row in data["images"]:
            word = parse_word(row["word"], p)
            images[(len(word), word_to_int(word, p))] = StepFunction.from_json(row["image"], p)
        return cls(p, int(data["depth"]), images)


def check_spectral_conditions(mu, nu, w: LinearOnSteps):
    """Check that ``w`` is multiplicative and integral-preserving on the
    cylinder indicators; if so, return the induced set map as an iso.

    Returns ``(report, iso_or_None)``.
    """
    p = w.p
    rep = Report("spectral isomorphism conditions")
    keys = sorted(w.images)
    chi = {k: StepFunction.indicator(ClopenSet.make(p, k[0], [k[1]])) for k in keys}

    bad = None
    for k in keys:
        img = w.images[k]
        if any(c != 1 for c, _ in img.terms):
            bad = {"cylinder": int_to_word(k[1], k[0], p), "image": repr(img)}
            break
    rep.add("W(chi_B) is an indicator", bad is None, len(keys), witness=bad)

    bad = None
    cases = 0
    for i, a in enumerate(keys):
        for b in keys[i:]:
            cases += 1
            prod = chi[a] * chi[b]
            if w(prod) != w.images[a] * w.images[b]:
                bad = (int_to_word(a[1], a[0], p), int_to_word(b[1], b[0], p))
                break
        if bad is not None:
            break
    rep.add("W(fg) = W(f) W(g) on indicators", bad is None, cases, witness=bad)

    bad = next((k for k in keys if integrate(mu, chi[k]) != integrate(nu, w.images[k])), None)
    rep.add("integral preserved", bad is None, len(keys),
            witness=None if bad is None else int_to_word(bad[1], bad[0], p))

    if not rep.ok:
        return rep, None
    phi = MeasureAlgebraIso(p, w.depth, {k: w.images[k].support() for k in keys})
    sub = phi.validate()
    for c in sub.checks:
        rep.add("extracted map: " + c.name, c.ok, c.cases, witness=c.witness)
    return rep, (phi if rep.ok else None)
