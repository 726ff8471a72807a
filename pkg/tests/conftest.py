import csv
from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
IDS = [f"F{k}" for k in range(1, 11)]

_acceptance_lines = []


def read_table(name):
    """Load a fixture table with the csv module only (independent of the parsers)."""
    with open(FIXTURES / name, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    header, body = rows[0], rows[1:]
    labels = [r[0] for r in body]
    values = np.array([[float(x) for x in r[1:]] for r in body])
    return header[1:], labels, values


@pytest.fixture(scope="session")
def table2():
    return read_table("table2.csv")[2]


@pytest.fixture(scope="session")
def table3():
    return read_table("table3.csv")[2]


@pytest.fixture(scope="session")
def table4():
    return read_table("table4.csv")[2]


@pytest.fixture(scope="session")
def table5():
    """Columns r, c, r+c, r-c per factor."""
    return read_table("table5.csv")[2]


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def record(number, description, ok):
        _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {description}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
