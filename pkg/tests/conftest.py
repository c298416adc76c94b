import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

_CRITERIA: dict = {}


@pytest.fixture
def criterion(request):
    """Register the acceptance criterion a test checks; the outcome is
    reported in the terminal summary."""

    def mark(number: int, title: str, detail: str = ""):
        _CRITERIA[request.node.nodeid] = [number, title, detail]

    def note(detail: str):
        _CRITERIA[request.node.nodeid][2] = detail

    mark.note = note
    return mark


def pytest_runtest_logreport(report):
    if report.when == "call" and report.nodeid in _CRITERIA:
        _CRITERIA[report.nodeid].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    rows = sorted(_CRITERIA.values(), key=lambda r: r[0])
    for row in rows:
        number, title, detail = row[:3]
        passed = row[3] if len(row) > 3 else False
        line = f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
