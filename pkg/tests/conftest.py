from dataclasses import replace

import pytest

from packisc.scenario import load_scenario
from packisc.sensing import NoiseSpec

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record(criterion: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS.append((criterion, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


@pytest.fixture(scope="session")
def default_scenario():
    return load_scenario()


@pytest.fixture(scope="session")
def quiet_scenario(default_scenario):
    return replace(default_scenario, noise=NoiseSpec(0.0, 0.0, 0.0, 0.0, 0.0, 0))


@pytest.fixture(scope="session")
def full_cycle_healthy(default_scenario):
    """One healthy run over a full drive cycle (1369 s)."""
    from packisc.scenario import run

    return run(replace(default_scenario, short=None, t_end=1369.0))
