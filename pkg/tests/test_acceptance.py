"""One pass/fail line per acceptance criterion (run with -s to see them)."""
import pytest

from squeezent.acceptance import CHECKS


@pytest.mark.parametrize("check", CHECKS, ids=[f"criterion_{c.number}" for c in CHECKS])
def test_criterion(check):
    result = check()
    print(result.line())
    assert result.passed, result.line()
