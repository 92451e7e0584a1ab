from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from nadyn.measure import BernoulliMeasure, HaarMeasure
from nadyn.shift import ClopenSet, PointWord

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def clopens(draw, p=None, max_depth=5):
    p = draw(st.sampled_from([2, 3])) if p is None else p
    depth = draw(st.integers(0, max_depth if p == 2 else min(max_depth, 4)))
    words = draw(st.sets(st.integers(0, p ** depth - 1)))
    return ClopenSet.make(p, depth, words)


@st.composite
def clopen_pairs(draw, max_depth=5, k=2):
    p = draw(st.sampled_from([2, 3]))
    return tuple(draw(clopens(p=p, max_depth=max_depth)) for _ in range(k))


@st.composite
def points(draw, p):
    pre = draw(st.lists(st.integers(0, p - 1), max_size=4))
    per = draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=4))
    return PointWord(p, tuple(pre), tuple(per))


rationals = st.builds(
    Fraction,
    st.integers(-10 ** 6, 10 ** 6),
    st.integers(1, 10 ** 4),
)
primes = st.sampled_from([2, 3, 5, 7, 11])


@pytest.fixture
def mu23():
    return BernoulliMeasure(2, 3, [-2, 3])


@pytest.fixture
def mu35():
    return BernoulliMeasure(3, 5, [-2, -2, 5])


@pytest.fixture
def mu_sym():
    return BernoulliMeasure(2, 3, [Fraction(1, 2), Fraction(1, 2)])


@pytest.fixture
def haar23():
    return HaarMeasure(2, 3)



def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for title, rep in results.items():
            terminalreporter.write_line(f"{'PASS' if rep.ok else 'FAIL'}  {title}")
