import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record ``(label, passed, detail)`` and fail the test when ``passed`` is false."""
    def check(label, passed, detail):
        ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  criterion {label}: {detail}")
        assert passed, detail
    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
