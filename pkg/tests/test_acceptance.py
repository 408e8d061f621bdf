"""Acceptance gate: one test per criterion, one pass/fail line each.

Every criterion checks the toolkit against an independent oracle at its
stated tolerance.  The verdict line is printed whether or not the
criterion passes, so a full run always shows the complete scoreboard.
"""

import pytest

from rmatld.verify import CRITERIA, AcceptanceContext


@pytest.fixture(scope="module")
def ctx():
    return AcceptanceContext()


@pytest.mark.parametrize("criterion_fn", CRITERIA,
                         ids=[fn.__name__ for fn in CRITERIA])
def test_criterion(ctx, criterion_fn):
    verdict = criterion_fn(ctx)
    print(verdict.line)
    assert verdict.passed, verdict.line
