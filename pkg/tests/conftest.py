"""Collects one pass/fail line per acceptance criterion and prints them at the end."""

import pytest

_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, budget, title = mark.args
    _RESULTS[number] = (rep.passed, rep.duration, budget, title)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_RESULTS):
        ok, dur, budget, title = _RESULTS[number]
        tr.write_line(f"criterion {number:>2}  {'PASS' if ok else 'FAIL'}  {dur:7.2f}s / {budget:g}s  {title}")
    passed = sum(1 for ok, *_ in _RESULTS.values() if ok)
    tr.write_line(f"{passed}/{len(_RESULTS)} criteria pass")
