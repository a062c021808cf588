import numpy as np
import pytest

from proplab import GridSpec, SampledField


@pytest.fixture
def grid():
    # N = 4 L^2 so the frequency axis coincides with the spatial axis;
    # several lattice identities (covariance, quarter rotations) need that
    return GridSpec(1, 8.0, 256)


@pytest.fixture
def small_grid():
    return GridSpec(1, 6.0, 128)


@pytest.fixture
def packet(grid):
    x = grid.axis()
    vals = np.exp(-np.pi * (x - 0.3) ** 2) * np.exp(2j * np.pi * 0.7 * x)
    return SampledField(grid, vals)
