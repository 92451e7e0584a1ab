"""Exit criteria for the library, runnable without pytest (``nadyn selftest``).

Each ``criterion_*`` function returns a :class:`Report`; :data:`CRITERIA`
lists them in order.
"""
from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction
from itertools import product

from .arith import UltraNorm, padic_abs
from .entropy import (Cover, EntropyValue, Partition, compare_entropies,
                      fekete_estimate, join, sum_exceeds, measure_entropy_H,
                      measure_entropy_sequence, partition_from_sets)
from .integrate import LinearOnSteps, StepFunction, check_spectral_conditions
from .measure import BernoulliMeasure, CountingMeasure, HaarMeasure, verify_measure_axioms
from .pathology import DigitStream, decay_sequence
from .report import Report
from .shift import ClopenSet, PointWord, cylinder, int_to_word, random_clopen
from .transform import (Transformation, check_conjugacy, check_iso_of_systems,
                        iso_from_permutation, point_map_from_iso)

SEED = 20240601
CASES = 200


def example_measures():
    return {
        "p2_l3": BernoulliMeasure(2, 3, [-2, 3]),
        "p3_l5": BernoulliMeasure(3, 5, [-2, -2, 5]),
        "p2_l5": BernoulliMeasure(2, 5, [-2, 3]),
    }


def depth1_partition(p: int) -> Partition:
    return Partition([cylinder((s,), p) for s in range(p)])


def criterion_cylinder_norms() -> Report:
    m = example_measures()["p2_l3"]
    rep = Report("1. cylinder norm formula")
    bad, cases = None, 0
    for n in range(1, 9):
        for word in product(range(2), repeat=n):
            cases += 1
            if m.norm(cylinder(word, 2)) != UltraNorm(3, word.count(1)):
                bad = word
                break
        if bad:
            break
    rep.add("||U_w|| = 3^-#{i: w_i = 1}, |w| <= 8", bad is None and cases == 510, cases, witness=bad)
    return rep


def criterion_entropy_example_a() -> Report:
    m = example_measures()["p3_l5"]
    rep = Report("2. entropy example A")
    seq = measure_entropy_sequence(m, Transformation.shift(3), depth1_partition(3), 6)
    bad = next((n for n, t in enumerate(seq.terms, start=1)
                if (t.exponent, t.count) != (n, 3 ** n)), None)
    rep.add("e_n = n and M_n = 3^n", bad is None, 6, witness=bad)
    est = fekete_estimate(seq)
    rep.add("classified extrapolated-zero", est.classification == "extrapolated-zero", 1,
            detail=est.classification)
    return rep


def criterion_entropy_example_b() -> Report:
    m = example_measures()["p3_l5"]
    shift = Transformation.shift(3)
    rep = Report("3. entropy example B and Kolmogorov-Sinai failure")
    beta = Partition([cylinder((0,), 3), cylinder((1,), 3) | cylinder((2,), 3)])
    seq = measure_entropy_sequence(m, shift, beta, 8)
    bad = next((n for n, t in enumerate(seq.terms, start=1)
                if (t.exponent, t.count) != (0, 2 ** n)), None)
    rep.add("a_n = n log2(2)", bad is None, 8, witness=bad)
    est_b = fekete_estimate(seq)
    ok = est_b.classification == "exact" and est_b.h_exact == EntropyValue(0, 2)
    rep.add("exact limit log2(2)", ok, 1, detail=f"{est_b.classification}, h={est_b.h_exact}")
    est_a = fekete_estimate(measure_entropy_sequence(m, shift, depth1_partition(3), 6))
    rep.add("h(beta) > h(alpha)", est_b.h > est_a.h, 1, detail=f"{est_b.h} > {est_a.h}")
    return rep


def criterion_shift_invariance() -> Report:
    rep = Report("4. shift invariance")
    rng = random.Random(SEED)
    for key in ("p2_l3", "p3_l5"):
        m = example_measures()[key]
        shift = Transformation.shift(m.p)
        sets = [ClopenSet.make(m.p, n, [w]) for n in range(7) for w in range(m.p ** n)]
        sets += [random_clopen(rng, m.p, 6) for _ in range(CASES)]
        bad = next((a for a in sets if m.measure(shift.preimage(a)) != m.measure(a)), None)
        rep.add(f"mu(sigma^-1 A) = mu(A) for {key}", bad is None, len(sets), witness=bad)
    return rep


def criterion_point_norms() -> Report:
    m = example_measures()["p2_l3"]
    rep = Report("5. N_mu on eventually periodic points")
    w = PointWord(2, (1,), (0,))
    nw, nsw = m.point_norm(w), m.point_norm(w.shifted())
    rep.add("N(1.0^inf) = 3^-1", nw == UltraNorm(3, 1), 1, detail=str(nw))
    rep.add("N(0^inf) = 1", nsw == UltraNorm(3, 0), 1, detail=str(nsw))
    rep.add("N(sigma w) = 3 N(w)", nsw.as_fraction() == 3 * nw.as_fraction(), 1)
    rep.add("N((01)^inf) = 0", m.point_norm(PointWord(2, (), (0, 1))).is_zero, 1)
    return rep


def criterion_entropy_comparison() -> Report:
    rep = Report("6. h_mu <= h_top")
    for key, m in example_measures().items():
        sub, a, b = compare_entropies(m, Transformation.shift(m.p), depth1_partition(m.p), 6)
        for c in sub.checks:
            rep.add(f"{key}: {c.name}", c.ok, c.cases, c.detail, c.witness)
        if key == "p2_l5":
            ok = all((t.exponent, t.count) == (0, 2 ** n) and u.count == 2 ** n
                     for n, (t, u) in enumerate(zip(a.terms, b.terms), start=1))
            rep.add("unit-norm case a_n = b_n = n", ok, 6)
            ea, eb = fekete_estimate(a), fekete_estimate(b)
            two = EntropyValue(0, 2)
            rep.add("both limits equal log2(2)", ea.h_exact == two and eb.h_exact == two, 2,
                    detail=f"{ea.h_exact}, {eb.h_exact}")
    return rep


def criterion_nonexample() -> Report:
    rep = Report("7. non-example decay")
    for p, period in ((2, (0, 1)), (3, (0, 1, 2))):
        x = DigitStream(p, (), period)
        try:
            table = decay_sequence(x, 30)
        except AssertionError as exc:
            rep.add(f"p={p}: |upsilon(J_n)|_p = p^-k_n", False, 0, detail=str(exc))
            continue
        rep.add(f"p={p}: |upsilon(J_n)|_p = p^-k_n", True, len(table.rows),
                detail=f"skipped n: {[n for n, _ in table.skipped][:5]}...")
        start = table.strictly_decreasing_from()
        norms = [str(r.norm) for r in table.rows]
        rep.add(f"p={p}: norms eventually strictly decreasing", start is not None,
                len(table.rows), detail="from row %s" % start if start is not None else
                "tail pairs repeat: " + ", ".join(norms[-4:]),
                witness=None if start is not None else [(r.n, r.k_n) for r in table.rows[-4:]])
        rep.add(f"p={p}: N_upsilon(x) = 0 while ||X_p|| >= 1", table.continuity_violated(), 1)
    return rep


def _residue(x: Fraction, modulus: int) -> int:
    return x.numerator * pow(x.denominator, -1, modulus) % modulus


_ORACLE_CACHE: dict = {}


def brute_force_sup_valuation(values, ell: int, k: int) -> int | None:
    """Minimum ``v_ell`` over all nonempty sub-sums of ``values``, by
    enumerating every achievable sub-sum modulo ``ell**k``.  Returns None
    when all sub-sums vanish modulo ``ell**k``."""
    modulus = ell ** k
    counts = Counter(_residue(v, modulus) for v in values)
    key = (ell, k, tuple(sorted(counts.items())))
    if key in _ORACLE_CACHE:
        return _ORACLE_CACHE[key]
    mask = (1 << modulus) - 1
    reach = 1  # bit r set: residue r is a sub-sum (empty sum included)
    for r, mult in counts.items():
        for _ in range(mult):
            rotated = ((reach << r) | (reach >> (modulus - r))) & mask if r else reach
            new = reach | rotated
            if new == reach:
                break
            reach = new
    best = None
    # nonempty sub-sums: the empty sum is only residue 0, which we skip anyway
    r = 1
    rest = reach >> 1
    while rest:
        if rest & 1:
            v = 0
            t = r
            while t % ell == 0:
                t //= ell
                v += 1
            best = v if best is None else min(best, v)
        rest >>= 1
        r += 1
    _ORACLE_CACHE[key] = best
    return best


def criterion_norm_oracle(max_depth: int = 4, oracle_depth: int = 7) -> Report:
    m = example_measures()["p2_l3"]
    rep = Report("8. closed-form norm vs brute-force sup")
    p, ell = 2, m.value_prime
    k = oracle_depth + 1
    leaf = {w: m.cylinder_measure(int_to_word(w, oracle_depth, p)) for w in range(p ** oracle_depth)}
    bad, cases = None, 0
    n_words = p ** max_depth
    for bits in range(1 << n_words):
        a = ClopenSet.make(p, max_depth, [w for w in range(n_words) if bits >> w & 1])
        cases += 1
        closed = m.norm(a)
        v = brute_force_sup_valuation([leaf[w] for w in a.refine(oracle_depth)], ell, k) \
            if not a.is_empty else None
        oracle = UltraNorm.zero(ell) if v is None else UltraNorm(ell, v)
        if closed != oracle:
            bad = (a.to_expr(), str(closed), str(oracle))
            break
    rep.add(f"all {cases} clopens of depth <= {max_depth}", bad is None, cases, witness=bad)
    return rep


def criterion_iso_conjugacy() -> Report:
    rep = Report("9. isomorphy <-> conjugacy round trip")
    m = BernoulliMeasure(2, 3, [Fraction(1, 2), Fraction(1, 2)])
    shift = Transformation.shift(2)
    swap = (1, 0)
    r = check_iso_of_systems(swap, shift, shift, m, m, 6)
    rep.add("check_iso_of_systems(swap)", r.ok, sum(c.cases for c in r.checks))
    phi = iso_from_permutation(swap, 7)
    r = check_conjugacy(phi, shift, shift, 6)
    rep.add("check_conjugacy(iso_from_permutation(swap))", r.ok, r.checks[0].cases)
    bad = None
    for word in product(range(2), repeat=4):
        x = PointWord(2, word, (0, 1))
        got = point_map_from_iso(phi, x, 4, m)
        if got != tuple(1 - a for a in word):
            bad = (word, got)
            break
    rep.add("point map recovers swap on all depth-4 prefixes", bad is None, 16, witness=bad)
    return rep


def criterion_spectral() -> Report:
    rep = Report("10. spectral condition extraction")
    m = BernoulliMeasure(2, 3, [Fraction(1, 2), Fraction(1, 2)])
    phi = iso_from_permutation((1, 0), 4)
    sub, extracted = check_spectral_conditions(m, m, LinearOnSteps.from_iso(phi))
    rep.add("U_phi passes", sub.ok, sum(c.cases for c in sub.checks))
    rep.add("extracted Phi equals the swap iso to depth 4", extracted == phi, 1)

    w = LinearOnSteps.from_iso(phi)
    images = dict(w.images)
    images[(0, 0)] = images[(0, 0)].scale(2)
    sub, extracted = check_spectral_conditions(m, m, LinearOnSteps(2, 4, images))
    fail = sub.failures()
    rep.add("coefficient-2 W rejected", not sub.ok and extracted is None and fail[0].witness is not None,
            1, detail=fail[0].name if fail else "")

    images = {k: v for k, v in LinearOnSteps.from_iso(iso_from_permutation((0, 1), 1)).images.items()}
    images[(1, 1)] = StepFunction.indicator(ClopenSet.full(2))
    sub, extracted = check_spectral_conditions(m, m, LinearOnSteps(2, 1, images))
    fail = sub.failures()
    rep.add("overlapping W rejected", not sub.ok and extracted is None and fail[0].witness is not None,
            1, detail=f"{fail[0].name}: {fail[0].witness}" if fail else "")
    return rep


def _random_rational(rng: random.Random) -> Fraction:
    num = rng.choice([0, 1, -1]) * rng.randint(0, 10 ** 4) * rng.choice([1, 2, 3, 5, 9, 25, 27])
    return Fraction(num, rng.randint(1, 500))


def _random_partition(rng: random.Random, p: int, max_depth: int = 3) -> Partition:
    d = rng.randint(0, max_depth)
    k = rng.randint(1, 4)
    groups: dict = {}
    for w in range(p ** d):
        groups.setdefault(rng.randrange(k), []).append(w)
    return Partition([ClopenSet.make(p, d, ws) for ws in groups.values()])


def _random_cover(rng: random.Random, p: int) -> Cover:
    sets = [random_clopen(rng, p, 2, 0.6) for _ in range(rng.randint(1, 3))]
    union = ClopenSet.empty(p)
    for s in sets:
        union = union | s
    if not union.is_full:
        sets.append(union.complement() | random_clopen(rng, p, 2, 0.3))
    return Cover(sets)


def criterion_property_suites() -> Report:
    rep = Report("11. axiom and property suites")
    rng = random.Random(SEED)
    primes = (2, 3, 5, 7)

    bad = None
    for _ in range(CASES):
        x, y, ell = _random_rational(rng), _random_rational(rng), rng.choice(primes)
        ax, ay = padic_abs(x, ell), padic_abs(y, ell)
        ok = padic_abs(x * y, ell) == ax * ay and padic_abs(x + y, ell) <= max(ax, ay)
        if ax != ay:
            ok = ok and padic_abs(x + y, ell) == max(ax, ay)
        if not ok:
            bad = (x, y, ell)
            break
    rep.add("ultrametric inequality and multiplicativity", bad is None, CASES, witness=bad)

    bad = None
    for _ in range(CASES):
        p = rng.choice((2, 3))
        a, b, c = (random_clopen(rng, p, 6 if p == 2 else 4) for _ in range(3))
        full = ClopenSet.full(p)
        ok = ((a | b) | c == a | (b | c) and (a & b) & c == a & (b & c)
              and a & (b | c) == (a & b) | (a & c) and a | (b & c) == (a | b) & (a | c)
              and ~(a | b) == ~a & ~b and ~(a & b) == ~a | ~b and a - b == a & ~b
              and a | ~a == full and (a & ~a).is_empty)
        if not ok:
            bad = (a, b, c)
            break
    rep.add("ring laws", bad is None, CASES, witness=bad)

    measures = list(example_measures().values()) + [HaarMeasure(2, 3), HaarMeasure(3, 2)]
    for m in measures:
        sub = verify_measure_axioms(m, 6, seed=SEED, samples=CASES)
        for c in sub.checks:
            rep.add(f"{m!r}: {c.name}", c.ok, c.cases, c.detail, c.witness)

    bad = None
    for i in range(CASES):
        size = rng.randint(1, 8)
        labels = [f"x{j}" for j in range(size)]
        h = [rng.choice([0, 0, 1, 3, 6, 9, -2]) for _ in labels]
        kappa = CountingMeasure(labels, h, rng.choice((2, 3)))
        a = kappa.random_set(rng)
        lhs = kappa.norm(a).is_zero
        rhs = all(kappa.measure(a & kappa.random_set(rng)) == kappa.measure(a) for _ in range(CASES))
        if lhs != rhs:
            bad = (kappa, a)
            break
    rep.add("negligible <=> mu(A & B) = mu(A) (counting measures)", bad is None, CASES, witness=bad)

    bad_sub = bad_inv = bad_mult = None
    exs = list(example_measures().values())
    for _ in range(CASES):
        m = rng.choice(exs)
        alpha, beta = _random_partition(rng, m.p), _random_partition(rng, m.p)
        ab = join(alpha, beta)
        ha, hb, hab = (measure_entropy_H(m, x) for x in (alpha, beta, ab))
        if sum_exceeds(hab, ha, hb):
            bad_sub = (m, alpha, beta)
        sig = lambda P: sum(1 for c in P.cells if not m.norm(c).is_zero)  # noqa: E731
        if sig(ab) > sig(alpha) * sig(beta):
            bad_mult = (m, alpha, beta)
        t = Transformation.shift(m.p)
        if measure_entropy_H(m, alpha.preimage(t)) != ha:
            bad_inv = (m, alpha)
    rep.add("H(alpha v beta) <= H(alpha) + H(beta)", bad_sub is None, CASES, witness=bad_sub)
    rep.add("H(T^-1 alpha) = H(alpha)", bad_inv is None, CASES, witness=bad_inv)
    rep.add("M(alpha v beta) <= M(alpha) M(beta)", bad_mult is None, CASES, witness=bad_mult)

    bad = None
    for _ in range(CASES):
        p = rng.choice((2, 3))
        u, w = _random_cover(rng, p), _random_cover(rng, p)
        lhs = partition_from_sets(u.join(w).members)
        rhs = join(partition_from_sets(u.members), partition_from_sets(w.members))
        if lhs != rhs:
            bad = (u, w)
            break
    rep.add("alpha(U v W) = alpha(U) v alpha(W)", bad is None, CASES, witness=bad)
    return rep


CRITERIA = [
    criterion_cylinder_norms,
    criterion_entropy_example_a,
    criterion_entropy_example_b,
    criterion_shift_invariance,
    criterion_point_norms,
    criterion_entropy_comparison,
    criterion_nonexample,
    criterion_norm_oracle,
    criterion_iso_conjugacy,
    criterion_spectral,
    criterion_property_suites,
]


def run_all(out=print) -> bool:
    ok = True
    for fn in CRITERIA:
        rep = fn()
        ok = ok and rep.ok
        for line in rep.lines():
            out(line)
    return ok
