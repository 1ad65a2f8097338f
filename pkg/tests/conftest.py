import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one pass/fail line for the acceptance summary."""

    def _record(criterion: int, ok: bool, detail: str = "") -> None:
        status = "PASS" if ok else "FAIL"
        _ACCEPTANCE_LINES.append(f"criterion {criterion}: {status}  {detail}".rstrip())

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
