"""Shared pytest hooks: one summary line per acceptance criterion."""

import pytest

_outcomes: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if report.skipped:
            reason = report.longrepr[2] if isinstance(report.longrepr, tuple) else str(report.longrepr)
            _outcomes[label] = ("SKIP", reason.removeprefix("Skipped: "))
        else:
            notes = [f"{k}: {v}" for k, v in report.user_properties]
            _outcomes[label] = ("PASS" if report.passed else "FAIL", "; ".join(notes))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_outcomes):
        status, note = _outcomes[label]
        terminalreporter.write_line(f"{status:4} {label}" + (f"  ({note})" if note else ""))
