"""Acceptance criteria at full scale; prints one PASS/FAIL line per criterion."""
import pytest

from roundlab.acceptance import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = CRITERIA[number](seed=0, scale=1.0)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
