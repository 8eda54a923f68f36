from __future__ import annotations

import re

import pytest

ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion as a PASS/FAIL line, then assert it."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {detail}"
        request.config.stash[ACCEPTANCE_KEY][number] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = dict(config.stash.get(ACCEPTANCE_KEY, {}))
    pattern = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")
    for key, reports in terminalreporter.stats.items():
        if key not in ("failed", "error"):
            continue
        for report in reports:
            m = pattern.search(getattr(report, "nodeid", ""))
            if m:
                n = int(m.group(1))
                results.setdefault(n, f"FAIL  criterion {n:>2}: raised before reporting")
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
