import pytest

# criterion number -> (title, passed, detail), filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def record(number: int, title: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE[number] = (title, passed, detail)
    line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}"
        if detail:
            line += f": {detail}"
        terminalreporter.write_line(line)


@pytest.fixture
def acceptance_record():
    return record
