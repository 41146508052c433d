"""Collects per-criterion outcomes from tests marked ``criterion`` and prints them."""

import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    if report.when == "setup" and report.passed:
        return
    entry = _RESULTS.setdefault(number, {"title": title, "passed": True, "tests": []})
    entry["tests"].append(item.name)
    entry["passed"] = entry["passed"] and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        entry = _RESULTS[number]
        mark = "PASS" if entry["passed"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {mark}  {entry['title']}")
