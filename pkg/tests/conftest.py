import pytest

ACCEPTANCE_LINES: dict = {}


@pytest.fixture
def report():
    """Record a criterion's verdict; the lines are echoed in the terminal summary."""

    def _report(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(ACCEPTANCE_LINES[number])
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
