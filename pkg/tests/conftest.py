"""Prints one pass/fail line per acceptance criterion at the end of the run."""

import pytest

_CRITERIA = []


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA.append((props["criterion"], report.outcome, props.get("detail", ""),
                          report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, outcome, detail, duration in sorted(_CRITERIA):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {detail}  ({duration:.1f} s)")


@pytest.fixture
def criterion(record_property):
    """``criterion(n)`` tags the test; ``criterion.detail(text)`` records the measured values."""

    class _Tag:
        def __call__(self, number):
            record_property("criterion", number)
            return self

        def detail(self, text):
            record_property("detail", text)

    return _Tag()
