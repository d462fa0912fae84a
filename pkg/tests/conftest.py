import pytest

ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


@pytest.fixture
def criterion():
    """Record ``(number, title, detail)`` and the pass/fail of the calling test."""

    def record(number, title, passed, detail):
        ACCEPTANCE[number] = ("PASS" if passed else "FAIL", title, detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{status}] {n}. {title}: {detail}")
