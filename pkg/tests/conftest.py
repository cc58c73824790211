import pytest

_LINES = []


@pytest.fixture
def record():
    """Collect one acceptance line; the terminal summary prints them all."""

    def _record(criterion, ok, detail):
        _LINES.append(f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        print(_LINES[-1])
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
