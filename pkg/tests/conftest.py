import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20180101)


ACCEPTANCE = []


def record(criterion: str, ok: bool, detail: str) -> None:
    """Log one acceptance verdict; printed in the terminal summary."""
    ACCEPTANCE.append((criterion, ok, detail))
    print(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
