"""Shared pytest wiring.

Tests marked ``@pytest.mark.acceptance(criterion=..., label=...)`` are
collected into a per-criterion verdict table printed after the run, one
PASS/FAIL line per criterion, so the gate can be read off the terminal
without grepping individual test ids.
"""

import re

import pytest

_verdicts = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(criterion, label): ties a test to a numbered acceptance criterion",
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    criterion = str(marker.kwargs.get("criterion", marker.args[0] if marker.args else "?"))
    label = marker.kwargs.get("label", item.name)
    # A criterion fails if any phase of its test fails (setup errors count).
    previous_pass, _ = _verdicts.get(criterion, (True, label))
    phase_ok = report.passed or (report.when != "call" and not report.failed)
    _verdicts[criterion] = (previous_pass and phase_ok, label)


def _criterion_key(name):
    m = re.match(r"(\d+)([a-z]*)", name)
    return (int(m.group(1)), m.group(2)) if m else (999, name)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_verdicts, key=_criterion_key):
        passed, label = _verdicts[criterion]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {criterion:>3}  {verdict}  {label}")
