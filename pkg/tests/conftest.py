import pytest

_RESULTS = {}


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion; call before asserting."""
    def record(number: int, title: str, ok: bool, detail: str = ""):
        _RESULTS[number] = (title, bool(ok), detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, ok, detail = _RESULTS[number]
        tail = f"  ({detail})" if detail else ""
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {number:2d}. {title}{tail}")
