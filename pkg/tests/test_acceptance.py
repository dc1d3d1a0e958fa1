"""Acceptance criteria 1-12, one PASS/FAIL line each.

Criteria 9, 10 and 11 contain printed targets that the computation does not
reproduce; they are expected to fail and are marked strict xfail, so an
unexpected pass is reported too.  Details live in the decisions ledger.
"""

import pytest

from voalab.acceptance import CRITERIA, run_criterion

KNOWN_FAILURES = {
    9: "printed U_{0,1} relation uses :JJJJ: (needs the bc current JE)",
    10: "printed J term of [G+_m, G-_n] disagrees with the computed (m - n + 1)",
    11: "universal and simple characters must differ at weight 2l+1 (a singular vector)",
}


def _param(k):
    marks = [pytest.mark.xfail(strict=True, reason=KNOWN_FAILURES[k])] if k in KNOWN_FAILURES else []
    return pytest.param(k, marks=marks, id=f"criterion-{k:02d}")


@pytest.mark.parametrize("k", [_param(k) for k in sorted(CRITERIA)])
def test_criterion(k, capsys):
    res = run_criterion(k)
    with capsys.disabled():
        print(f"\n{res.line()}")
    assert res.passed, res.detail
