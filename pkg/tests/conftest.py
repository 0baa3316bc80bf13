import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Collects one pass/fail line per acceptance criterion; the lines are
    echoed in the terminal summary so they survive output capturing."""

    def _report(num: int, passed: bool, detail: str) -> None:
        line = f"criterion {num:2d}: {'PASS' if passed else 'FAIL'} - {detail}"
        print(f"\n[acceptance] {line}")
        ACCEPTANCE_LINES.append(line)

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
