import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sr2fista import bench, prox  # noqa: E402
from sr2fista.problem import (Optimum, ProblemSpec, quadratic,  # noqa: E402
                              zero_regularizer)


@pytest.fixture(scope="session")
def paper6():
    return bench.build_paper6()


@pytest.fixture(scope="session")
def paper6_x0():
    return bench.paper6_x0()


def small_l1(seed=1):
    return bench.build_quadratic_l1(10, seed)


def small_mcp(seed=2):
    return bench.build_quadratic_mcp(10, seed)


def pure_quadratic():
    Q = np.array([[3.0, 1.0], [1.0, 2.0]])
    c = np.array([1.0, -2.0])
    return ProblemSpec(quadratic(Q, c), zero_regularizer(), 2, Optimum(c, 0.0))


def mu_zero_l1(seed=3):
    return bench.build_quadratic_l1(10, seed, mu_zero=True)


@pytest.fixture
def zoo():
    return {"quadratic_l1": small_l1(), "quadratic_mcp": small_mcp(),
            "pure_quadratic": pure_quadratic()}


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
