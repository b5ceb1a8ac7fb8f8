"""The acceptance gate: one test per exit criterion, at the pinned tolerances.

Run with ``pytest tests/test_acceptance.py -v`` (or ``dbarn verify-all``); each
criterion prints its one-line pass/fail summary with the measured evidence.
"""

import pytest

from dbarn.acceptance import CRITERIA, DEFAULT_SEED, run_criterion


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number):
    result = run_criterion(number, DEFAULT_SEED)
    print(result.summary())
    assert result.passed, result.summary()
