from fractions import Fraction
from pathlib import Path

import pytest

from sparsegof.fileio import ProbabilityVector

DATA = Path(__file__).parent / "data"

# (criterion id, passed, detail) appended by test_acceptance.py
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


@pytest.fixture()
def half():
    return ProbabilityVector.from_values([Fraction(1, 2)] * 2)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {cid}: {detail}")
