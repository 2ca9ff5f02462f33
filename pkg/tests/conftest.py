import pytest

from dltag import seed_grammar

ACCEPTANCE: list[tuple[int, bool, str]] = []


@pytest.fixture(scope="session")
def grammar():
    return seed_grammar()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, text in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}")
