from __future__ import annotations

import time

import pytest

from treebounds.data import load_bundled
from treebounds.experiment import ExperimentConfig, run_experiment

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def iris():
    return load_bundled("iris")


@pytest.fixture(scope="session")
def iris_runs(iris):
    """25 seeded splits of the bundled Iris data, every model, plus the wall time they took."""
    start = time.perf_counter()
    records, rows = run_experiment(iris, ExperimentConfig(n_runs=25))
    return records, {row["model"]: row for row in rows}, time.perf_counter() - start


@pytest.fixture
def acceptance():
    """Record the outcome of an acceptance criterion for the terminal summary."""

    def record(number: int, ok: bool, detail: str) -> None:
        _ACCEPTANCE[number] = (ok, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
