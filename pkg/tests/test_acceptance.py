"""The acceptance gate: every criterion of the self-test suite, at full size.

The suite runs once per session through the same code path as
`cpmackey selftest` (printing one pass/fail line per criterion); each
criterion and each golden-file comparison then surfaces as its own test.
"""

import io
import os

import pytest

from cpmackey import selftest


PMAX = int(os.environ.get("CPMACKEY_TEST_PMAX", "5"))


@pytest.fixture(scope="session")
def selftest_results():
    out = io.StringIO()
    results = selftest.run(suite="all", pmax=PMAX, jobs=1, out=out)
    print()
    print(out.getvalue(), end="")
    return {name: (ok, detail) for name, ok, detail in results}


CRITERIA = [name for name, _fn, _tags in selftest.CRITERIA]


@pytest.mark.parametrize("name", CRITERIA)
def test_criterion(name, selftest_results):
    ok, detail = selftest_results[name]
    assert ok, detail


@pytest.mark.parametrize("name", CRITERIA)
def test_golden(name, selftest_results):
    ok, detail = selftest_results["golden:" + name]
    assert ok, detail
