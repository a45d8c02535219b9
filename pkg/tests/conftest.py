import math

import numpy as np
import pytest

from deltakick.engine import SpatialGrid, make_ground_state

SQRT2 = math.sqrt(2.0)
DX_I = 1 / SQRT2

ACCEPTANCE_LINES = []


@pytest.fixture
def grid():
    return SpatialGrid(4096, 20.0)


@pytest.fixture
def ground(grid):
    return make_ground_state(grid)


@pytest.fixture(scope="session")
def wide_grid():
    """Holds free expansion up to t ~ 20 with room to spare."""
    return SpatialGrid(4096, 150.0)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_state(grid, rng, centre=0.0, width=1.0, chirp=0.3, kick=0.5):
    """Normalised chirped Gaussian with a smooth random complex ripple (band-limited)."""
    x = grid.x
    psi = np.exp(-(x - centre) ** 2 / (4 * width ** 2) + 1j * (chirp * x ** 2 + kick * x))
    amp = rng.normal(size=(3, 2))
    ripple = sum(a * np.cos((k + 1) * x + b) for k, (a, b) in enumerate(amp))
    psi = psi * (1 + 0.1 * ripple * np.exp(1j * rng.uniform(0, 2 * np.pi)))
    return psi / np.sqrt(np.sum(np.abs(psi) ** 2) * grid.spacing)
