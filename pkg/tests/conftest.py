"""Shared fixtures and the acceptance summary printed after the run."""

import pytest

ACCEPTANCE_SEED = 2021

_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one pass/fail line for the acceptance summary.

    Call ``report(criterion, passed, detail)``; the line is printed at once
    (visible with ``-s``) and again in the terminal summary.
    """

    def _report(criterion, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion:>2}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
