"""Acceptance criteria at full settings, one PASS/FAIL line each."""

import pytest

from charsum_lab import acceptance


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, capsys):
    res = acceptance.CRITERIA[number](quick=False)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.measured
