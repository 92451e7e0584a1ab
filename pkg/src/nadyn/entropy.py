"""Partitions, covers, measure entropy, topological entropy and the
Fekete limit estimate.

Entropy values are kept symbolically as ``(e, M)`` meaning
``l**(-e) * log2(M)`` (logarithms are base 2 throughout) and rendered to
decimals only for output and for comparisons that mix different ``e``.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from decimal import Decimal, localcontext
from typing import Sequence

from .errors import ResourceError, VerificationError
from .report import Report
from .shift import ClopenSet

log = logging.getLogger(__name__)

MAX_CELLS = 5_000_000
MAX_ATOM_SETS = 16
MAX_COVER_SEARCH = 24
DIGITS = 50
TOLERANCE = Decimal("1e-30")
_PREC = 80
_EXACT_BITS = 1 << 20


def _words_budget(p: int, depth: int) -> None:
    if p ** depth > MAX_CELLS:
        raise ResourceError(f"refinement to depth {depth} needs {p ** depth} words (> {MAX_CELLS})")


def _common_depth(sets) -> int:
    return max((s.depth for s in sets), default=0)


class Partition:
    """Finite clopen partition of the shift space; cells canonical and sorted."""

    def __init__(self, cells: Sequence[ClopenSet], check: bool = True):
        cells = [c for c in cells if not c.is_empty]
        if not cells:
            raise ValueError("a partition needs at least one nonempty cell")
        p = cells[0].p
        if any(c.p != p for c in cells):
            raise ValueError("cells over different alphabets")
        self.p = p
        self.cells = tuple(sorted(set(cells), key=ClopenSet.sort_key))
        if check:
            self._validate(len(cells))

    def _validate(self, given: int) -> None:
        n = _common_depth(self.cells)
        seen: dict[int, ClopenSet] = {}
        for c in self.cells:
            for w in c.refine(n):
                if w in seen:
                    raise ValueError(f"cells {seen[w].to_expr()!r} and {c.to_expr()!r} overlap")
                seen[w] = c
        if given != len(self.cells):
            raise ValueError("a cell is repeated")
        if len(seen) != self.p ** n:
            missing = next(w for w in range(self.p ** n) if w not in seen)
            raise ValueError(f"cells do not cover: word {ClopenSet.make(self.p, n, [missing]).to_expr()} missing")

    @property
    def depth(self) -> int:
        return _common_depth(self.cells)

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def __eq__(self, other):
        return isinstance(other, Partition) and self.cells == other.cells

    def __hash__(self):
        return hash(self.cells)

    def labels(self, n: int) -> dict[int, int]:
        out = {}
        for i, c in enumerate(self.cells):
            for w in c.refine(n):
                out[w] = i
        return out

    def preimage(self, t) -> "Partition":
        return Partition([t.preimage(c) for c in self.cells], check=False)

    def __repr__(self):
        return "Partition(" + " | ".join(c.to_expr() for c in self.cells) + ")"


class Cover:
    """Finite clopen cover; members may overlap.  Duplicates are dropped."""

    def __init__(self, members: Sequence[ClopenSet]):
        members = [m for m in members if not m.is_empty]
        if not members:
            raise ValueError("empty cover")
        p = members[0].p
        union = ClopenSet.empty(p)
        for m in members:
            if m.p != p:
                raise ValueError("members over different alphabets")
            union = union | m
        if not union.is_full:
            raise ValueError(f"members do not cover: {union.complement().to_expr()} missing")
        self.p = p
        self.members = tuple(sorted(set(members), key=ClopenSet.sort_key))

    @classmethod
    def from_partition(cls, alpha: Partition) -> "Cover":
        return cls(alpha.cells)

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        return isinstance(other, Cover) and self.members == other.members

    def join(self, other: "Cover") -> "Cover":
        return Cover([a & b for a in self.members for b in other.members])

    def preimage(self, t) -> "Cover":
        return Cover([t.preimage(m) for m in self.members])

    def __repr__(self):
        return "Cover(" + " | ".join(c.to_expr() for c in self.members) + ")"


def partition_from_sets(sets: Sequence[ClopenSet], max_sets: int = MAX_ATOM_SETS) -> Partition:
    """The atoms: nonempty intersections choosing each set or its complement."""
    sets = list(sets)
    if not sets:
        raise ValueError("need at least one set")
    if len(sets) > max_sets:
        raise ResourceError(f"{len(sets)} sets exceed the atom limit {max_sets}")
    p = sets[0].p
    n = _common_depth(sets)
    _words_budget(p, n)
    refined = [s.refine(n) for s in sets]
    groups = defaultdict(list)
    for w in range(p ** n):
        groups[tuple(w in r for r in refined)].append(w)
    return Partition([ClopenSet.make(p, n, ws) for ws in groups.values()], check=False)


def join(alpha: Partition, beta: Partition) -> Partition:
    if alpha.p != beta.p:
        raise ValueError("alphabet mismatch")
    n = max(alpha.depth, beta.depth)
    _words_budget(alpha.p, n)
    la, lb = alpha.labels(n), beta.labels(n)
    groups = defaultdict(list)
    for w, i in la.items():
        groups[(i, lb[w])].append(w)
    if len(groups) > MAX_CELLS:
        raise ResourceError(f"join has {len(groups)} cells (> {MAX_CELLS})")
    return Partition([ClopenSet.make(alpha.p, n, ws) for ws in groups.values()], check=False)


def refines(alpha: Partition, beta: Partition) -> bool:
    """``alpha < beta``: every cell of ``alpha`` is a union of cells of ``beta``."""
    n = max(alpha.depth, beta.depth)
    la, lb = alpha.labels(n), beta.labels(n)
    owner = {}
    for w, j in lb.items():
        if owner.setdefault(j, la[w]) != la[w]:
            return False
    return True


def dynamical_join(t, alpha: Partition, n: int) -> Partition:
    return _dynamical_joins(t, alpha, n)[-1]


def _dynamical_joins(t, alpha: Partition, n: int) -> list[Partition]:
    """``[alpha, alpha v T^-1 alpha, ..., alpha v ... v T^-(n-1) alpha]``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    # each shift preimage adds one symbol of depth; check the final size up front
    grow = n - 1 if getattr(t, "kind", None) == "shift" else 0
    _words_budget(alpha.p, alpha.depth + grow)
    out = [alpha]
    current, pulled = alpha, alpha
    for _ in range(1, n):
        pulled = pulled.preimage(t)
        current = join(current, pulled)
        out.append(current)
    return out


@dataclass(frozen=True)
class EntropyValue:
    """``prime**(-exponent) * log2(count)``; zero when ``exponent`` is None
    or ``count <= 1``.  ``prime`` may be None when ``exponent == 0``."""

    exponent: int | None
    count: int
    prime: int | None = None
    degenerate: bool = False

    def __post_init__(self):
        if self.exponent is None or self.exponent == 0:
            object.__setattr__(self, "prime", None)

    @property
    def is_zero(self) -> bool:
        return self.exponent is None or self.count <= 1

    def decimal(self, digits: int = DIGITS) -> Decimal:
        if self.is_zero:
            return Decimal(0)
        with localcontext() as ctx:
            ctx.prec = _PREC
            if self.count & (self.count - 1) == 0:
                v = Decimal(self.count.bit_length() - 1)
            else:
                v = Decimal(self.count).ln() / Decimal(2).ln()
            if self.exponent:
                v = v * Decimal(self.prime) ** (-self.exponent)
        with localcontext() as ctx:
            ctx.prec = digits
            return +v

    def __float__(self):
        return float(self.decimal())

    def compare(self, other: "EntropyValue") -> int:
        """Sign of ``self - other``; exact when the norm primes agree."""
        if self.is_zero or other.is_zero:
            return (not self.is_zero) - (not other.is_zero)
        ea, eb = self.exponent, other.exponent
        if ea == eb:
            return (self.count > other.count) - (self.count < other.count)
        prime = self.prime if ea else other.prime
        same = ea == 0 or eb == 0 or self.prime == other.prime
        if same:
            # l^-ea log Ma vs l^-eb log Mb  <=>  Ma^(l^d) vs Mb  (d = eb - ea > 0)
            big, small, sign = (self, other, 1) if eb > ea else (other, self, -1)
            d = abs(eb - ea)
            scale = prime ** d if d < 64 else None
            if scale is not None and scale * big.count.bit_length() <= _EXACT_BITS:
                lhs = big.count ** scale
                return sign * ((lhs > small.count) - (lhs < small.count))
        diff = self.decimal(_PREC) - other.decimal(_PREC)
        if abs(diff) <= TOLERANCE:
            return 0
        return 1 if diff > 0 else -1

    def __str__(self):
        if self.is_zero:
            return "0"
        if not self.exponent:
            return f"log2({self.count})"
        return f"{self.prime}^{-self.exponent}*log2({self.count})"


def sum_exceeds(total: EntropyValue, *parts: EntropyValue) -> bool:
    """``total > sum(parts)`` beyond the comparison tolerance."""
    with localcontext() as ctx:
        ctx.prec = _PREC
        return total.decimal(_PREC) - sum(p.decimal(_PREC) for p in parts) > TOLERANCE


def _q(x: Decimal) -> str:
    with localcontext() as ctx:
        ctx.prec = DIGITS
        return str(+x)


@dataclass
class EntropySequence:
    """``a_1..a_N`` for the n-fold joins, on an alphabet of size ``p``."""

    terms: list
    p: int

    def __len__(self):
        return len(self.terms)

    def decimals(self) -> list[Decimal]:
        return [t.decimal(_PREC) for t in self.terms]

    def ratios(self) -> list[Decimal]:
        with localcontext() as ctx:
            ctx.prec = _PREC
            return [a / n for n, a in enumerate(self.decimals(), start=1)]

    def subadditivity_witness(self):
        a = self.decimals()
        n = len(a)
        with localcontext() as ctx:
            ctx.prec = _PREC
            for i in range(1, n + 1):
                for j in range(1, n + 1 - i):
                    if a[i + j - 1] - (a[i - 1] + a[j - 1]) > TOLERANCE:
                        return (i, j)
        return None

    def rows(self) -> list[dict]:
        out = []
        for n, (t, r) in enumerate(zip(self.terms, self.ratios()), start=1):
            out.append({"n": n, "e_n": "" if t.exponent is None else t.exponent,
                        "M_n": t.count, "a_n_decimal": _q(t.decimal(_PREC)),
                        "ratio": _q(r)})
        return out


@dataclass
class FeketeEstimate:
    upper: Decimal
    last_ratio: Decimal
    classification: str
    h: Decimal | None
    lower: Decimal
    h_exact: EntropyValue | None = None

    def to_json(self) -> dict:
        return {"upper": _q(self.upper), "last_ratio": _q(self.last_ratio),
                "classification": self.classification,
                "h": None if self.h is None else _q(self.h),
                "lower": _q(self.lower),
                "h_exact": None if self.h_exact is None else str(self.h_exact)}


def _integer_root(m: int, n: int) -> int | None:
    r = round(m ** (1.0 / n)) if m.bit_length() < 1000 else None
    if r is None:
        return None
    for c in (r - 1, r, r + 1):
        if c > 0 and c ** n == m:
            return c
    return None


def _exact_ratio(term: EntropyValue, n: int) -> EntropyValue | None:
    """``term / n`` as an entropy value when ``count`` is a perfect n-th power."""
    if term.is_zero:
        return EntropyValue(None, 0, term.prime)
    root = _integer_root(term.count, n)
    if root is None or term.exponent % n:
        return None
    return EntropyValue(term.exponent // n, root, term.prime)


def fekete_estimate(seq: EntropySequence, tail: int | None = None) -> FeketeEstimate:
    """Limit of ``a_n / n`` for a subadditive sequence.

    ``upper`` is ``min a_n/n``, an upper bound for the limit.  The tail
    (default: last half, at least 3 terms) decides the classification:
    constant ratios give ``exact``; strictly growing norm exponents with
    ``M_n <= p**n`` give ``extrapolated-zero``; anything else is a
    ``bracket`` between 0 and ``upper``.
    """
    if not seq.terms:
        raise ValueError("empty sequence")
    a = seq.decimals()
    if any(x < 0 for x in a):
        raise ValueError("entropy terms must be nonnegative")
    bad = seq.subadditivity_witness()
    if bad is not None:
        i, j = bad
        raise ValueError(f"not subadditive: a_{i + j} > a_{i} + a_{j}")
    ratios = seq.ratios()
    upper = min(ratios)
    n_terms = len(a)
    k = tail if tail is not None else max(3, n_terms // 2)
    if n_terms >= 3 and k >= 3 and k <= n_terms:
        tail_r = ratios[-k:]
        with localcontext() as ctx:
            ctx.prec = _PREC
            flat = max(tail_r) - min(tail_r) <= TOLERANCE
        if flat:
            return FeketeEstimate(upper, ratios[-1], "exact", tail_r[-1], tail_r[-1],
                                  _exact_ratio(seq.terms[-1], n_terms))
        idx = range(n_terms - k, n_terms)
        es = [seq.terms[i].exponent for i in idx]
        if all(e is not None for e in es):
            growing = all(y > x for x, y in zip(es, es[1:]))
            slope = min(Decimal(e) / (i + 1) for e, i in zip(es, idx))
            bounded = all(seq.terms[i].count <= seq.p ** (i + 1) for i in idx)
            if growing and slope > 0 and bounded:
                return FeketeEstimate(upper, ratios[-1], "extrapolated-zero", Decimal(0), Decimal(0))
    return FeketeEstimate(upper, ratios[-1], "bracket", None, Decimal(0))


def measure_entropy_H(m, alpha: Partition) -> EntropyValue:
    norms = [m.norm(c) for c in alpha.cells]
    significant = [nm for nm in norms if not nm.is_zero]
    if not significant:
        log.warning("every cell of %r is negligible; entropy set to 0", alpha)
        return EntropyValue(None, 0, m.value_prime, degenerate=True)
    e = max(nm.exponent for nm in significant)
    return EntropyValue(e, len(significant), m.value_prime)


def measure_entropy_sequence(m, t, alpha: Partition, n: int) -> EntropySequence:
    seq = EntropySequence([measure_entropy_H(m, j) for j in _dynamical_joins(t, alpha, n)], alpha.p)
    if any(x < 0 for x in seq.decimals()):
        raise VerificationError("negative entropy term")
    bad = seq.subadditivity_witness()
    if bad is not None:
        raise VerificationError(f"a_(n+m) > a_n + a_m at (n, m) = {bad}", witness=bad)
    return seq


def _cover_masks(members: Sequence[ClopenSet]) -> tuple[list[int], int]:
    n = _common_depth(members)
    p = members[0].p
    _words_budget(p, n)
    masks = []
    for m in members:
        mask = 0
        for w in m.refine(n):
            mask |= 1 << w
        masks.append(mask)
    return masks, (1 << p ** n) - 1


def min_subcover_size(cover: Cover, max_search: int = MAX_COVER_SEARCH) -> int:
    """Exact minimum number of members whose union is the whole space."""
    masks, universe = _cover_masks(cover.members)
    masks = sorted(set(masks), key=lambda m: -bin(m).count("1"))
    # drop members contained in another member
    masks = [m for i, m in enumerate(masks)
             if not any(j != i and m | o == o for j, o in enumerate(masks))]
    chosen = 0
    uncovered = universe
    while True:
        forced = set()
        rest = uncovered
        while rest:
            low = rest & -rest
            owners = [m for m in masks if m & low]
            if len(owners) == 1:
                forced.add(owners[0])
            rest ^= low
        if not forced:
            break
        for m in forced:
            uncovered &= ~m
        chosen += len(forced)
        masks = [m for m in masks if m not in forced and m & uncovered]
        restricted = [m & uncovered for m in masks]
        keep = {}
        for m, r in zip(masks, restricted):
            keep.setdefault(r, m)
        masks = [keep[r] for r in keep
                 if not any(o != r and r | o == o for o in keep)]
    if not uncovered:
        return chosen
    if len(masks) > max_search:
        raise ResourceError(f"{len(masks)} undominated members exceed the exact-search limit {max_search}")

    best = [len(masks) + 1]

    def search(unc: int, used: int) -> None:
        if used >= best[0]:
            return
        if not unc:
            best[0] = used
            return
        low = unc & -unc
        for m in masks:
            if m & low:
                search(unc & ~m, used + 1)

    search(uncovered, 0)
    return chosen + best[0]


def topological_entropy_sequence(t, cover: Cover, n: int) -> EntropySequence:
    terms = []
    current, pulled = cover, cover
    for k in range(1, n + 1):
        if k > 1:
            pulled = pulled.preimage(t)
            current = current.join(pulled)
            if len(current) > MAX_CELLS:
                raise ResourceError(f"joined cover has {len(current)} members")
        terms.append(EntropyValue(0, min_subcover_size(current)))
    seq = EntropySequence(terms, cover.p)
    bad = seq.subadditivity_witness()
    if bad is not None:
        raise VerificationError(f"topological sequence not subadditive at {bad}", witness=bad)
    return seq


def unit_norm_up_to(m, depth: int) -> bool:
    """Every cylinder of depth ``<= depth`` has norm exactly 1."""
    p = m.p
    return all(m.norm(ClopenSet.make(p, d, [w])).exponent == 0
               for d in range(depth + 1) for w in range(p ** d))


def compare_entropies(m, t, alpha: Partition, n: int):
    """``a_n <= b_n`` termwise, with equality asserted when every
    cylinder up to depth ``n`` has norm 1.  Returns ``(report, a, b)``."""
    a = measure_entropy_sequence(m, t, alpha, n)
    b = topological_entropy_sequence(t, Cover.from_partition(alpha), n)
    rep = Report(f"h_mu <= h_top for {m!r}")
    bad = next((k + 1 for k, (x, y) in enumerate(zip(a.terms, b.terms)) if x.compare(y) > 0), None)
    rep.add("a_n <= b_n", bad is None, n, witness=bad)
    unit = unit_norm_up_to(m, n)
    if unit:
        bad = next((k + 1 for k, (x, y) in enumerate(zip(a.terms, b.terms)) if x.compare(y) != 0), None)
        rep.add("a_n = b_n (unit-norm measure)", bad is None, n, witness=bad)
    else:
        rep.add("unit-norm condition", True, 0, detail="not satisfied; equality not asserted")
    return rep, a, b
