import pytest

_RESULTS = {}


@pytest.fixture
def criterion():
    """Record one acceptance verdict; the summary prints them in order."""
    def record(num, title, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {num:>2}  {title}: {detail}"
        _RESULTS[num] = line
        print("\n" + line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(_RESULTS):
            terminalreporter.write_line(_RESULTS[num])
