"""Acceptance gate: every criterion at its stated tolerance, one line each.

Run with -s (or look at captured stdout) for the per-criterion PASS lines.
"""

import pytest

from qclab import acceptance


@pytest.mark.parametrize("runner", acceptance.CRITERIA, ids=lambda f: f.__name__)
def test_acceptance_criterion(runner):
    result = runner()
    print(result.line())
    assert result.passed, result.line()
