"""Shared fixtures and the one-line-per-criterion acceptance summary."""

from __future__ import annotations

import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")
_results: dict[int, tuple[str, str, float]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    num, name = int(m.group(1)), m.group(2).replace("_", " ")
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.outcome == "passed" else "FAIL"
        _, prev, dur = _results.get(num, (name, "PASS", 0.0))
        _results[num] = (name, "FAIL" if "FAIL" in (prev, status) else "PASS", dur + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        name, status, dur = _results[num]
        terminalreporter.write_line(f"criterion {num:2d} {status}  {name} ({dur:.1f} s)")
