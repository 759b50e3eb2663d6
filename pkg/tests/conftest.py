from pathlib import Path

import pytest

from potq.benchmarks import cex_task, toy_indep

DATA = Path(__file__).parent / "data"

# CEX action ids: o1=0, o2=1, o3=2
O1, O2, O3 = 0, 1, 2
PI1 = (O1, O2, O3)
PI2 = (O3, O1, O2)
PI3 = (O1, O3, O2)


@pytest.fixture
def cex():
    return cex_task()


@pytest.fixture
def toy():
    return toy_indep


@pytest.fixture
def data_dir():
    return DATA


_acceptance_lines = []


@pytest.fixture
def criterion():
    """Record a one-line pass/fail verdict for the terminal summary."""

    def record(name: str, ok: bool, detail: str = ""):
        _acceptance_lines.append(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
