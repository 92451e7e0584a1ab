"""Transformations of the full shift and finite-depth measure algebra isomorphisms."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DomainError, NeedsMoreDepth, ResourceError
from .report import Report
from .shift import (ClopenSet, PointWord, check_alphabet, format_word,
                    int_to_word, parse_word, random_clopen, shift_image,
                    shift_preimage, word_to_int)

KINDS = ("shift", "perm", "odometer")


def _check_perm(pi: Sequence[int], p: int) -> tuple:
    pi = tuple(int(a) for a in pi)
    if sorted(pi) != list(range(p)):
        raise ValueError(f"{list(pi)} is not a permutation of range({p})")
    return pi


def _relabel(a: ClopenSet, table: Sequence[int]) -> ClopenSet:
    p, n = a.p, a.depth
    out = []
    for w in a.words:
        word = int_to_word(w, n, p)
        out.append(word_to_int([table[s] for s in word], p))
    return ClopenSet.make(p, n, out)


def _little_endian(w: int, n: int, p: int) -> int:
    v = 0
    for _ in range(n):
        w, s = divmod(w, p)
        v = v * p + s
    return v


def _odometer_words(a: ClopenSet, step: int) -> ClopenSet:
    # add ``step`` with carry to the first depth(a) digits, read little-endian
    p, n = a.p, a.depth
    if n == 0:
        return a
    mod = p ** n
    out = [_little_endian((_little_endian(w, n, p) + step) % mod, n, p) for w in a.words]
    return ClopenSet.make(p, n, out)


def _carry(x: PointWord, bump: int, wrap: int) -> PointWord:
    """Add (``bump=1``) or subtract (``bump=-1``) one with carry."""
    p = x.p
    pre = list(x.preperiod)
    for i, a in enumerate(pre):
        if a != wrap:
            pre[i] = a + bump
            return PointWord(p, tuple(pre), x.period)
        pre[i] = p - 1 - wrap
    per = list(x.period)
    for j, a in enumerate(per):
        if a != wrap:
            head = [p - 1 - wrap] * j + [a + bump] + per[j + 1:]
            return PointWord(p, tuple(pre) + tuple(head), x.period)
    return PointWord(p, (), (p - 1 - wrap,))


@dataclass(frozen=True)
class Transformation:
    """The shift, a symbolwise permutation, or the odometer on ``p`` symbols."""

    kind: str
    p: int
    pi: tuple = field(default=())

    def __post_init__(self):
        check_alphabet(self.p)
        if self.kind not in KINDS:
            raise ValueError(f"unknown transformation kind {self.kind!r}")
        if self.kind == "perm":
            object.__setattr__(self, "pi", _check_perm(self.pi, self.p))

    @classmethod
    def shift(cls, p):
        return cls("shift", p)

    @classmethod
    def permutation(cls, pi):
        return cls("perm", len(pi), tuple(pi))

    @classmethod
    def identity(cls, p):
        return cls("perm", p, tuple(range(p)))

    @classmethod
    def odometer(cls, p):
        return cls("odometer", p)

    @property
    def invertible(self) -> bool:
        return self.kind != "shift"

    @property
    def inverse_pi(self) -> tuple:
        inv = [0] * self.p
        for a, b in enumerate(self.pi):
            inv[b] = a
        return tuple(inv)

    def preimage(self, a: ClopenSet) -> ClopenSet:
        if a.p != self.p:
            raise ValueError("alphabet mismatch")
        if self.kind == "shift":
            return shift_preimage(a, 1)
        if self.kind == "perm":
            return _relabel(a, self.inverse_pi)
        return _odometer_words(a, -1)

    def image(self, a: ClopenSet) -> ClopenSet:
        if a.p != self.p:
            raise ValueError("alphabet mismatch")
        if self.kind == "shift":
            return shift_image(a)
        if self.kind == "perm":
            return _relabel(a, self.pi)
        return _odometer_words(a, 1)

    def point(self, x: PointWord) -> PointWord:
        if self.kind == "shift":
            return x.shifted()
        if self.kind == "perm":
            return PointWord(x.p, tuple(self.pi[s] for s in x.preperiod),
                             tuple(self.pi[s] for s in x.period))
        return _carry(x, 1, self.p - 1)

    def point_inverse(self, x: PointWord) -> PointWord:
        if self.kind == "shift":
            raise DomainError("the shift is not invertible")
        if self.kind == "perm":
            inv = self.inverse_pi
            return PointWord(x.p, tuple(inv[s] for s in x.preperiod),
                             tuple(inv[s] for s in x.period))
        return _carry(x, -1, 0)

    def preimage_power(self, a: ClopenSet, k: int) -> ClopenSet:
        for _ in range(k):
            a = self.preimage(a)
        return a

    def to_json(self) -> dict:
        if self.kind == "perm":
            return {"kind": "perm", "pi": list(self.pi)}
        return {"kind": self.kind}

    def __str__(self):
        if self.kind == "perm":
            return "perm:" + ",".join(map(str, self.pi))
        return self.kind


def load_transformation(data, p: int) -> Transformation:
    """From JSON (``{"kind": ...}``) or the short forms ``shift``,
    ``odometer``, ``identity`` and ``perm:1,0``."""
    if isinstance(data, str):
        text = data.strip()
        if text in ("shift", "odometer"):
            return Transformation(text, p)
        if text == "identity":
            return Transformation.identity(p)
        if text.startswith("perm:"):
            pi = [int(t) for t in text[5:].split(",")]
            if len(pi) != p:
                raise ValueError(f"permutation {pi} does not act on {p} symbols")
            return Transformation.permutation(pi)
        raise ValueError(f"cannot parse transformation {data!r}")
    kind = data.get("kind")
    if kind == "perm":
        pi = data["pi"]
        if len(pi) != p:
            raise ValueError(f"permutation {pi} does not act on {p} symbols")
        return Transformation.permutation(pi)
    if kind == "identity":
        return Transformation.identity(p)
    return Transformation(kind, p)


def _all_cylinders(p: int, depth: int):
    for n in range(depth + 1):
        for w in range(p ** n):
            yield ClopenSet.make(p, n, [w])


def check_measure_preserving(m, t: Transformation, depth: int = 6,
                             seed: int = 0, samples: int = 100) -> Report:
    if depth > 10:
        raise ResourceError("depth limited to 10")
    rep = Report(f"{t} preserves {m!r}")
    sets = list(_all_cylinders(m.p, depth))
    rng = random.Random(seed)
    sets += [random_clopen(rng, m.p, depth) for _ in range(samples)]

    def run(name, fn):
        bad = next((a for a in sets if m.measure(fn(a)) != m.measure(a)), None)
        rep.add(name, bad is None, len(sets), witness=bad)

    run("mu(T^-1 A) = mu(A)", t.preimage)
    if t.invertible:
        run("mu(T A) = mu(A)", t.image)
    return rep


class MeasureAlgebraIso:
    """Images of all cylinders of depth ``<= depth``, extended by unions."""

    def __init__(self, p: int, depth: int, images: dict):
        self.p = check_alphabet(p)
        self.depth = depth
        self.images = dict(images)
        for n in range(depth + 1):
            for w in range(p ** n):
                if (n, w) not in self.images:
                    raise ValueError(f"missing image of cylinder {format_word(int_to_word(w, n, p))!r}")

    def __call__(self, a: ClopenSet) -> ClopenSet:
        if a.p != self.p:
            raise ValueError("alphabet mismatch")
        if a.depth > self.depth:
            raise NeedsMoreDepth(f"set of depth {a.depth} beyond iso depth {self.depth}")
        out = ClopenSet.empty(self.p)
        for w in a.words:
            out = out | self.images[(a.depth, w)]
        return out

    def cylinder_image(self, word: Sequence[int]) -> ClopenSet:
        return self.images[(len(word), word_to_int(word, self.p))]

    def __eq__(self, other):
        if not isinstance(other, MeasureAlgebraIso):
            return NotImplemented
        n = min(self.depth, other.depth)
        return self.p == other.p and all(
            self.images[k] == other.images[k] for k in self.images if k[0] <= n)

    def restrict(self, depth: int) -> "MeasureAlgebraIso":
        return MeasureAlgebraIso(self.p, depth,
                                 {k: v for k, v in self.images.items() if k[0] <= depth})

    def validate(self, mu=None, nu=None) -> Report:
        """Boolean-algebra isomorphism at each depth, depth compatibility,
        and (given both measures) ``nu(Phi(B)) = mu(B)``."""
        p = self.p
        rep = Report("measure algebra isomorphism")
        full = ClopenSet.full(p)
        bad = None
        for n in range(self.depth + 1):
            union = ClopenSet.empty(p)
            for w in range(p ** n):
                img = self.images[(n, w)]
                if img.is_empty or not union.isdisjoint(img):
                    bad = int_to_word(w, n, p)
                    break
                union = union | img
            if bad is None and union != full:
                bad = ("depth", n)
            if bad is not None:
                break
        rep.add("atoms map to a partition (unions and complements preserved)",
                bad is None, self.depth + 1, witness=bad)
        bad = None
        for n in range(self.depth):
            for w in range(p ** n):
                kids = ClopenSet.empty(p)
                for s in range(p):
                    kids = kids | self.images[(n + 1, w * p + s)]
                if kids != self.images[(n, w)]:
                    bad = int_to_word(w, n, p)
                    break
            if bad is not None:
                break
        rep.add("compatible across depths", bad is None, self.depth, witness=bad)
        if mu is not None:
            nu = mu if nu is None else nu
            bad = next((k for k, img in self.images.items()
                        if nu.measure(img) != mu.measure(ClopenSet.make(p, k[0], [k[1]]))), None)
            rep.add("measure preserving", bad is None, len(self.images),
                    witness=None if bad is None else int_to_word(bad[1], bad[0], p))
        return rep

    def to_json(self) -> dict:
        rows = []
        for (n, w), img in sorted(self.images.items()):
            rows.append({"word": format_word(int_to_word(w, n, self.p)), "image": img.to_json()})
        return {"p": self.p, "depth": self.depth, "images": rows}

    @classmethod
    def from_json(cls, data: dict) -> "MeasureAlgebraIso":
        p = int(data["p"])
        images = {}
        for row in data["images"]:
            word = parse_word(row["word"], p)
            images[(len(word), word_to_int(word, p))] = ClopenSet.from_json(row["image"])
        return cls(p, int(data["depth"]), images)


def iso_from_permutation(pi: Sequence[int], depth: int) -> MeasureAlgebraIso:
    p = len(pi)
    pi = _check_perm(pi, p)
    images = {}
    for n in range(depth + 1):
        for w in range(p ** n):
            images[(n, w)] = _relabel(ClopenSet.make(p, n, [w]), pi)
    return MeasureAlgebraIso(p, depth, images)


def iso_from_block_map(block_map: dict, block: int, p: int, depth: int) -> MeasureAlgebraIso:
    """Relabel consecutive non-overlapping blocks of length ``block`` by a
    bijection of ``p**block`` words; partial trailing blocks map to the
    union over their completions."""
    table = {tuple(k): tuple(v) for k, v in block_map.items()}
    words = sorted(table)
    if len(table) != p ** block or sorted(table.values()) != words or any(len(k) != block for k in words):
        raise ValueError("block map must be a bijection of all length-block words")

    def img_word(word):
        out = []
        for i in range(0, len(word), block):
            out.extend(table[tuple(word[i:i + block])])
        return out

    images = {}
    for n in range(depth + 1):
        full_len = -(-n // block) * block
        k = full_len - n
        for w in range(p ** n):
            word = int_to_word(w, n, p)
            ext = [word + int_to_word(c, k, p) for c in range(p ** k)]
            images[(n, w)] = ClopenSet.make(p, full_len, [word_to_int(img_word(e), p) for e in ext])
    return MeasureAlgebraIso(p, depth, images)


def check_conjugacy(phi: MeasureAlgebraIso, t: Transformation, s: Transformation,
                    depth: int) -> Report:
    """``Phi(T^-1 B) = S^-1(Phi(B))`` for every cylinder ``B`` up to ``depth``."""
    raise_by = 1 if t.kind == "shift" else 0
    if phi.depth < depth + raise_by:
        raise ResourceError(f"iso known to depth {phi.depth}, need {depth + raise_by}")
    rep = Report(f"conjugacy of {t} and {s}")
    bad = None
    cases = 0
    for b in _all_cylinders(phi.p, depth):
        cases += 1
        lhs, rhs = phi(t.preimage(b)), s.preimage(phi(b))
        if lhs != rhs:
            bad = {"B": b.to_expr(), "Phi(T^-1 B)": lhs.to_expr(), "S^-1 Phi(B)": rhs.to_expr()}
            break
    rep.add("Phi o T^-1 = S^-1 o Phi", bad is None, cases, witness=bad)
    return rep


def point_map_from_iso(phi: MeasureAlgebraIso, x: PointWord, d: int, m=None) -> tuple:
    """Length-``d`` prefix of the point in the intersection of ``Phi(U_{x[0:n)})``."""
    if m is not None and m.point_norm(x).is_zero:
        raise DomainError(f"point {x} is negligible")
    if d > phi.depth:
        raise NeedsMoreDepth(f"output depth {d} beyond iso depth {phi.depth}")
    current = ClopenSet.full(phi.p)
    for n in range(1, phi.depth + 1):
        current = current & phi.cylinder_image(x.prefix(n))
    if current.is_empty:
        raise NeedsMoreDepth("nested images have empty intersection")
    n = max(current.depth, d)
    prefixes = {w // phi.p ** (n - d) for w in current.refine(n)}
    if len(prefixes) != 1:
        raise NeedsMoreDepth(f"{len(prefixes)} candidate prefixes of length {d}")
    return int_to_word(prefixes.pop(), d, phi.p)


def check_iso_of_systems(pi: Sequence[int], t: Transformation, s: Transformation,
                         mu, nu, depth: int) -> Report:
    """Point isomorphism by a symbol permutation ``phi``: measure
    preservation and ``phi o T = S o phi`` at the level of preimages."""
    phi = Transformation.permutation(pi)
    rep = Report(f"isomorphy via {phi} of {t} and {s}")
    cyls = list(_all_cylinders(phi.p, depth))
    bad = next((b for b in cyls if mu.measure(phi.preimage(b)) != nu.measure(b)), None)
    rep.add("measure preserving", bad is None, len(cyls), witness=bad)
    bad = next((b for b in cyls
                if phi.preimage(s.preimage(b)) != t.preimage(phi.preimage(b))), None)
    rep.add("phi o T = S o phi", bad is None, len(cyls), witness=bad)
    return rep
