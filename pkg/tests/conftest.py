import math

import numpy as np
import pytest

from phasepsr import kernels
from phasepsr.qlinalg import StateVector, bloch_ball_qubit, haar_qubit
from phasepsr.rng import Xoshiro256

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_line():
    """Record one PASS/FAIL line for the end-of-run acceptance summary."""
    def record(number, title, ok, detail):
        _ACCEPTANCE_LINES.append(
            (number, f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {title} -- {detail}")
        )
        print(_ACCEPTANCE_LINES[-1][1])
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def phi_grid():
    return np.linspace(0.0, 2 * math.pi, 64, endpoint=False)


@pytest.fixture
def gen():
    return Xoshiro256(12345)


@pytest.fixture
def plus_state():
    return StateVector((2,), np.array([1.0, 1.0]) / math.sqrt(2)).density()


@pytest.fixture
def haar_xi(gen):
    return haar_qubit(gen).density()


@pytest.fixture
def mixed_xi(gen):
    return bloch_ball_qubit(gen)


@pytest.fixture(params=kernels.available_backends())
def each_backend(request):
    with kernels.backend(request.param):
        yield request.param
