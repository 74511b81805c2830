import numpy as np
import pytest

from kdirac.beam import BeamParams
from kdirac.grid import GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def small_grid():
    """64x32 box, unit-ish spacings, packet-friendly."""
    return GridSpec(nx=64, ny=32, x_min=-32.0, x_max=32.0, y_span=32.0,
                    y_offset0=-16.0)


@pytest.fixture
def showcase_beam():
    return BeamParams(a0=0.1, k_L=0.1, epsilon=0.02, longitudinal_on=True,
                      gauge_shift=-1.0)


def random_field(grid, rng, rep="position"):
    from kdirac.grid import SpinorField

    data = rng.standard_normal((4, grid.nx, grid.ny)) \
        + 1j * rng.standard_normal((4, grid.nx, grid.ny))
    if rep == "position":
        norm = np.sqrt(np.sum(np.abs(data) ** 2) * grid.cell_area)
    else:
        norm = np.sqrt(np.sum(np.abs(data) ** 2))
    return SpinorField(data / norm, rep)
