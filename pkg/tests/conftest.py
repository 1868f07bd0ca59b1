import numpy as np
import pytest

from anisomult.geometry import build_geometry
from anisomult.spectral import Grid
from anisomult import hardy


@pytest.fixture(scope="session")
def geo1d():
    return build_geometry(np.array([[2.0]]))


@pytest.fixture(scope="session")
def geo2d():
    return build_geometry(np.array([[2.0, 1.0], [0.0, 2.0]]))


@pytest.fixture(scope="session")
def family1d(geo1d):
    grid = Grid.centered(np.array([32.0]), 4096)
    return hardy.build_lp_family(geo1d, grid,
                                 hardy.default_j_range(geo1d, grid),
                                 certified_shells=(-2, 4))
