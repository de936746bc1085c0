import numpy as np
import pytest

from gaborlab import Grid, gaussian_window, signal_family


@pytest.fixture(scope="session")
def grid():
    """Default desk-scale grid: 256 samples, dt = 1/16 (extent +-8)."""
    return Grid(256, 1.0 / 16)


@pytest.fixture(scope="session")
def window(grid):
    return gaussian_window(grid, 1.0)


@pytest.fixture(scope="session")
def grid512():
    """Wide grid for lattice-radius-8 matrix work (extent +-16)."""
    return Grid(512, 1.0 / 16)


@pytest.fixture(scope="session")
def window512(grid512):
    return gaussian_window(grid512, 1.0)


@pytest.fixture(scope="session")
def family(grid):
    return signal_family(grid)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
