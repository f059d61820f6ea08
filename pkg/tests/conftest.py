import pytest

# filled by test_acceptance.py: criterion number -> (passed, message)
ACCEPTANCE = {}


def record(num: int, passed: bool, message: str) -> None:
    ACCEPTANCE[num] = (passed, message)
    print(f"[{'PASS' if passed else 'FAIL'}] AC{num}: {message}")


@pytest.fixture
def acceptance_record():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        passed, message = ACCEPTANCE[num]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] AC{num}: {message}")
