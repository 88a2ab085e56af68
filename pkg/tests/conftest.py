import pytest

CRITERIA: dict[int, tuple[str, str, float]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        status, title, secs = CRITERIA[num]
        terminalreporter.write_line(f"{status} criterion {num:2d}: {title} ({secs:.1f} s)")
