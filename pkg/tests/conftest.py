import sys

import pytest

from fibertrap.atom import cesium
from fibertrap.modes import FiberSpec, solve_he11
from fibertrap.potential import CIRCULAR, LINEAR, TrapConfiguration

A = 0.2e-6
LAM_RED = 1.06e-6
LAM_BLUE = 700e-9


@pytest.fixture(scope="session")
def atom():
    return cesium()


@pytest.fixture(scope="session")
def fiber():
    return FiberSpec(A)


@pytest.fixture(scope="session")
def red_mode(fiber):
    return solve_he11(fiber, LAM_RED)


@pytest.fixture(scope="session")
def blue_mode(fiber):
    return solve_he11(fiber, LAM_BLUE)


@pytest.fixture(scope="session")
def trap(atom):
    return TrapConfiguration.build(atom, A, LAM_RED, LAM_BLUE, 30e-3, 29e-3, CIRCULAR)


@pytest.fixture(scope="session")
def trap_linear(atom):
    return TrapConfiguration.build(atom, A, LAM_RED, LAM_BLUE, 30e-3, 35e-3, LINEAR)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
