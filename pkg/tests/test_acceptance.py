"""Acceptance gate: every advertised numeric claim at its stated tolerance.

Each test runs one named criterion from the verification module (the same
code the `capamp verify` command executes) and prints a PASS/FAIL line, so
`pytest -s tests/test_acceptance.py` doubles as a readable report.
"""

import pytest

from capamp import verify


@pytest.mark.parametrize("name,criterion", verify.ACCEPTANCE, ids=[n for n, _ in verify.ACCEPTANCE])
def test_acceptance(name, criterion):
    checks = criterion(tol=verify.DEFAULT_TOL, seed=0)
    failures = [c for c in checks if not c.passed]
    status = "PASS" if not failures else "FAIL"
    print(f"{status} {name} ({len(checks) - len(failures)}/{len(checks)} checks)")
    detail = "; ".join(
        f"{c.check_id}: expected {c.op} {c.expected} (tol {c.tolerance}), got {c.actual}"
        for c in failures
    )
    assert not failures, detail
