from __future__ import annotations

import pytest

from zsm import fixtures
from zsm.compile import compile_system
from zsm.errors import BudgetExceeded
from zsm.ess import ess_of
from zsm.unfold import unfold


@pytest.fixture(scope="session")
def pi1():
    return fixtures.load("pi1")


@pytest.fixture(scope="session")
def intro1():
    return fixtures.load("intro1")


@pytest.fixture(scope="session")
def intro2():
    return fixtures.load("intro2")


def extract(sys, layers: int, events: int | None = None):
    net = compile_system(sys)
    on, fm = unfold(net, layers, events)
    return net, on, fm, ess_of(on, fm)


def extract_within(sys, max_layers: int = 3, event_budget: int = 1000, replay_budget: int = 2000):
    """Deepest layer bound (down to 1) whose unfolding and replay fit the budgets."""
    net = compile_system(sys)
    for k in range(max_layers, 0, -1):
        on, fm = unfold(net, k, event_budget)
        if on.truncated:
            continue
        try:
            return k, on, fm, ess_of(on, fm, budget=replay_budget)
        except BudgetExceeded:
            continue
    raise AssertionError("system does not fit the budgets even at one layer")


# -- acceptance summary -------------------------------------------------------

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    number = int(name.split("_")[2])
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[number] = ("PASS" if report.passed else "FAIL", name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        outcome, name = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {outcome}  {name}")
