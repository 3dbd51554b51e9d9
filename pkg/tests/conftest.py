"""Collects acceptance-criterion outcomes and prints one PASS/FAIL line per label."""

import pytest

_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    label, title = mark.args
    ok = rep.passed if rep.when == "call" else False
    prev = _RESULTS.get(label, (title, True))
    _RESULTS[label] = (title, prev[1] and ok)


def _key(label):
    head = "".join(ch for ch in label if ch.isdigit())
    return (int(head) if head else 0, label)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_RESULTS, key=_key):
        title, ok = _RESULTS[label]
        terminalreporter.write_line(f"CRITERION {label:<4} {'PASS' if ok else 'FAIL'}  {title}")
