import numpy as np
import pytest

from dbarn.geometry import default_geometry


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def geom():
    """Shared default grid (cached by the library as well)."""
    return default_geometry()


@pytest.fixture(scope="session")
def geom_fine():
    """Finer radial grid for the disc solver accuracy checks."""
    return default_geometry(radial_nodes=1200, angular_nodes=128, refine_depth=8)
