import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from conftest import clopens, points
from nadyn.errors import DomainError, NeedsMoreDepth, ResourceError
from nadyn.measure import BernoulliMeasure, HaarMeasure
from nadyn.shift import ClopenSet, PointWord, contains_point, cylinder, random_clopen
from nadyn.transform import (MeasureAlgebraIso, Transformation, check_conjugacy,
                             check_iso_of_systems, check_measure_preserving,
                             iso_from_block_map, iso_from_permutation,
                             load_transformation, point_map_from_iso)

SHIFT2 = Transformation.shift(2)
SWAP = Transformation.permutation((1, 0))
ODO2 = Transformation.odometer(2)


def add_one_table(n, p):
    """Little-endian add-one on all length-n words, built by carrying digit by digit."""
    table = {}
    for word in product(range(p), repeat=n):
        out, carry = list(word), 1
        for i in range(n):
            s = out[i] + carry
            out[i], carry = s % p, s // p
        table[word] = tuple(out)
    return table


def test_preimage_examples():
    assert SHIFT2.preimage(cylinder((1,), 2)) == ClopenSet.from_words(2, [(0, 1), (1, 1)])
    assert SWAP.preimage(cylinder((0, 1), 2)) == cylinder((1, 0), 2)
    table = add_one_table(2, 2)
    pre = [w for w, img in table.items() if img == (0, 0)]
    assert pre == [(1, 1)]
    assert ODO2.preimage(cylinder((0, 0), 2)) == cylinder((1, 1), 2)


@pytest.mark.parametrize("p, n", [(2, 3), (3, 2)])
def test_odometer_preimage_matches_carry_table(p, n):
    t = Transformation.odometer(p)
    for word, img in add_one_table(n, p).items():
        assert t.preimage(cylinder(img, p)) == cylinder(word, p)
        assert t.image(cylinder(word, p)) == cylinder(img, p)


@given(st.data())
def test_point_action_consistent_with_preimage(data):
    p = data.draw(st.sampled_from([2, 3]))
    kind = data.draw(st.sampled_from(["shift", "odometer", "perm"]))
    t = Transformation.permutation((2, 0, 1)[:p] if p == 3 else (1, 0)) if kind == "perm" \
        else Transformation(kind, p)
    a = data.draw(clopens(p=p, max_depth=4))
    x = data.draw(points(p))
    assert contains_point(t.preimage(a), x) == contains_point(a, t.point(x))
    if t.invertible:
        assert t.point_inverse(t.point(x)) == x


def test_odometer_carry_on_all_max_digits():
    assert ODO2.point(PointWord(2, (), (1,))) == PointWord(2, (), (0,))
    assert ODO2.point_inverse(PointWord(2, (), (0,))) == PointWord(2, (), (1,))
    assert ODO2.point(PointWord(2, (1, 1), (1, 0))) == PointWord(2, (0, 0, 0, 1), (1, 0))


def test_check_measure_preserving_examples(mu23, mu35, haar23):
    assert check_measure_preserving(mu23, SHIFT2).ok
    assert check_measure_preserving(mu35, Transformation.shift(3)).ok
    rep = check_measure_preserving(mu23, SWAP)
    assert not rep.ok
    assert rep.failures()[0].witness == cylinder((0,), 2)
    assert check_measure_preserving(haar23, ODO2).ok
    with pytest.raises(ResourceError):
        check_measure_preserving(mu23, SHIFT2, depth=11)


def test_iso_from_permutation_examples(mu_sym):
    ident = iso_from_permutation((0, 1), 3)
    for n in range(4):
        for w in range(2 ** n):
            c = ClopenSet.make(2, n, [w])
            assert ident(c) == c
    swap = iso_from_permutation((1, 0), 2)
    assert swap(cylinder((0, 1), 2)) == cylinder((1, 0), 2)
    phi = iso_from_permutation((1, 0), 4)
    assert phi.validate(mu_sym).ok
    rng = random.Random(0)
    for _ in range(100):
        b = random_clopen(rng, 2, 4)
        assert mu_sym.measure(phi(b)) == mu_sym.measure(b)


def test_iso_validate_detects_non_preserving(mu23):
    rep = iso_from_permutation((1, 0), 3).validate(mu23)
    assert [c.name for c in rep.failures()] == ["measure preserving"]


def test_iso_json_roundtrip():
    phi = iso_from_permutation((1, 0), 3)
    assert MeasureAlgebraIso.from_json(phi.to_json()) == phi


def test_check_conjugacy_examples():
    assert check_conjugacy(iso_from_permutation((1, 0), 6), SHIFT2, SHIFT2, 5).ok
    rep = check_conjugacy(iso_from_permutation((0, 1), 6), SHIFT2, ODO2, 5)
    assert not rep.ok and rep.failures()[0].witness is not None
    ident = Transformation.identity(2)
    assert check_conjugacy(iso_from_permutation((1, 0), 4), ident, ident, 4).ok
    with pytest.raises(ResourceError):
        check_conjugacy(iso_from_permutation((1, 0), 3), SHIFT2, SHIFT2, 3)


def test_point_map_examples(mu_sym, mu23):
    phi = iso_from_permutation((1, 0), 5)
    assert point_map_from_iso(phi, PointWord(2, (), (0, 1, 0)), 3) == (1, 0, 1)
    x = PointWord(2, (1, 1, 0), (0, 1))
    assert point_map_from_iso(iso_from_permutation((0, 1), 5), x, 5) == x.prefix(5)
    with pytest.raises(DomainError):
        point_map_from_iso(phi, PointWord(2, (), (0, 1)), 3, mu23)
    with pytest.raises(NeedsMoreDepth):
        point_map_from_iso(phi, x, 6)


def test_point_map_through_block_relabel(haar23):
    # swap the pair blocks 00 <-> 11, keep 01 and 10
    block = {(0, 0): (1, 1), (1, 1): (0, 0), (0, 1): (0, 1), (1, 0): (1, 0)}
    phi = iso_from_block_map(block, 2, 2, 4)
    assert phi.validate(haar23).ok
    assert point_map_from_iso(phi, PointWord(2, (), (0,)), 2) == block[(0, 0)]
    assert point_map_from_iso(phi, PointWord(2, (0, 1), (1,)), 4) == (0, 1, 0, 0)
    # depth-1 data cannot decide a length-1 prefix for the pair relabeling
    with pytest.raises(NeedsMoreDepth):
        point_map_from_iso(phi.restrict(1), PointWord(2, (), (0,)), 1)


def test_check_iso_of_systems_examples(mu_sym, mu23, haar23):
    assert check_iso_of_systems((1, 0), SHIFT2, SHIFT2, mu_sym, mu_sym, 5).ok
    rep = check_iso_of_systems((1, 0), SHIFT2, SHIFT2, mu23, mu23, 5)
    assert [c.name for c in rep.failures()] == ["measure preserving"]
    assert check_iso_of_systems((0, 1), ODO2, ODO2, haar23, haar23, 5).ok


def test_iso_of_systems_implies_conjugacy_for_all_permutations():
    m = HaarMeasure(3, 2)
    shift = Transformation.shift(3)
    for pi in [(0, 1, 2), (1, 0, 2), (2, 1, 0), (1, 2, 0)]:
        assert check_iso_of_systems(pi, shift, shift, m, m, 4).ok
        phi = iso_from_permutation(pi, 5)
        assert check_conjugacy(phi, shift, shift, 4).ok
        for word in product(range(3), repeat=3):
            assert point_map_from_iso(phi, PointWord(3, word, (0, 1)), 3) == tuple(pi[a] for a in word)


def test_norm_invariance_under_isomorphisms():
    cases = [(iso_from_permutation((1, 0), 5), BernoulliMeasure(2, 3, [Fraction(1, 2)] * 2)),
             (iso_from_permutation((1, 0, 2), 4), BernoulliMeasure(3, 5, [-2, -2, 5]))]
    for phi, m in cases:
        assert phi.validate(m).ok
        for n in range(phi.depth + 1):
            for w in range(m.p ** n):
                a = ClopenSet.make(m.p, n, [w])
                assert m.norm(phi(a)) == m.norm(a)
        rng = random.Random(1)
        for _ in range(100):
            a = random_clopen(rng, m.p, phi.depth)
            assert m.norm(phi(a)) == m.norm(a)
            assert m.norm(phi(a)).is_zero == m.norm(a).is_zero


@given(points(3))
def test_point_norm_invariant_under_invertible(x):
    m = BernoulliMeasure(3, 5, [-2, -2, 5])
    assert m.point_norm(Transformation.permutation((1, 0, 2)).point(x)) == m.point_norm(x)
    h = HaarMeasure(3, 2)
    assert h.point_norm(Transformation.odometer(3).point(x)) == h.point_norm(x)


def test_shift_breaks_point_norm_invariance(mu23):
    w = PointWord(2, (1,), (0,))
    assert mu23.point_norm(SHIFT2.point(w)).as_fraction() == 3 * mu23.point_norm(w).as_fraction()


@given(clopens(p=2, max_depth=4))
def test_preimage_preserves_negligibility(a):
    m = BernoulliMeasure(2, 3, [-2, 3])
    for t in (SHIFT2,):
        assert m.norm(t.preimage(a)).is_zero == m.norm(a).is_zero
        assert m.norm(t.preimage(a)) == m.norm(a)


def test_load_transformation():
    assert load_transformation("shift", 2) == SHIFT2
    assert load_transformation("perm:1,0", 2) == SWAP
    assert load_transformation({"kind": "odometer"}, 2) == ODO2
    assert load_transformation(SWAP.to_json(), 2) == SWAP
    with pytest.raises(ValueError):
        load_transformation("perm:0,0", 2)
    with pytest.raises(ValueError):
        load_transformation("perm:1,0", 3)
