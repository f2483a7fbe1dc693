"""Shared fixtures plus a terminal summary for the acceptance suite.

Tests marked ``@pytest.mark.acceptance(num, name)`` are aggregated per
criterion number and reported as one PASS/FAIL line each at the end of
the run.
"""

import numpy as np
import pytest

_results: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(num, name): test belonging to a numbered ship criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None and report.when == "call":
        num, name = marker.args
        entry = _results.setdefault(int(num), {"name": name, "ok": True})
        if not report.passed:
            entry["ok"] = False


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        entry = _results[num]
        verdict = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(
            "criterion %2d  %-44s %s" % (num, entry["name"], verdict))


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
