"""Shared pytest plumbing.

The acceptance tests in ``test_acceptance.py`` register a one-line summary
per criterion.  The hooks below collect the call-phase outcome of every
acceptance test and print a compact pass/fail table after the run, so the
criteria are visible even without ``-v``.
"""

import pytest

_DETAIL: dict[str, str] = {}
_OUTCOME: dict[str, str] = {}


@pytest.fixture(scope="session")
def acceptance():
    """Callable for acceptance tests to attach a measured-value detail line."""

    def record(name: str, line: str) -> None:
        _DETAIL[name] = line

    return record


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    if report.when == "call" and item.fspath.basename == "test_acceptance.py":
        _OUTCOME[item.name] = report.outcome
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _OUTCOME:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_OUTCOME):
        status = _OUTCOME[name].upper()
        detail = _DETAIL.get(name, "")
        suffix = f"  ({detail})" if detail else ""
        terminalreporter.write_line(f"{status:6s} {name}{suffix}")
