"""The ten acceptance criteria; each prints one PASS/FAIL line (run with -s to see them)."""

import pytest

from inclogic import acceptance


@pytest.mark.parametrize("check", acceptance.CHECKS, ids=lambda c: f"criterion-{c.number}")
def test_acceptance_criterion(check, capsys):
    res = check()
    with capsys.disabled():
        print("\n" + res.line())
        for failure in res.failures[:5]:
            print("    " + str(failure))
    assert res.passed, res.failures[:5]
    assert res.checked > 0


def test_all_criteria_are_present():
    assert [c.number for c in acceptance.CHECKS] == list(range(1, 11))
