from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from enrichedsoa.finkernel import FiniteMap, fin  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def to_map(t: tuple) -> FiniteMap:
    """Oracle triple ``(n, m, table)`` to a kernel map."""
    n, m, table = t
    return FiniteMap(fin(n), fin(m), tuple(table))


@pytest.fixture
def record_acceptance():
    return ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
