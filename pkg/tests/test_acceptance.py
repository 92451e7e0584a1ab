"""End-to-end acceptance criteria; one PASS/FAIL line per criterion is
printed (run with ``-s`` to see them live, they are also in the report)."""
import pytest

from nadyn.acceptance import CRITERIA

RESULTS = {}


@pytest.mark.parametrize("criterion", CRITERIA, ids=[fn.__name__ for fn in CRITERIA])
def test_criterion(criterion):
    rep = criterion()
    RESULTS[rep.title] = rep
    print(f"\n{'PASS' if rep.ok else 'FAIL'}  {rep.title}")
    for line in rep.lines()[1:]:
        print(line)
    assert rep.ok, "\n".join(rep.lines())

