import numpy as np
import pytest

from wecopt.geometry import WecGeometry
from wecopt.hydro import AnalyticHydro, FrequencyGrid, SeaState, default_grid
from wecopt.objectives import WaveClimate


@pytest.fixture(scope="session")
def grid():
    return default_grid()


@pytest.fixture(scope="session")
def provider(grid):
    return AnalyticHydro(grid)


@pytest.fixture
def reference_geometry():
    """Cylinder used throughout as a hand-checkable baseline."""
    return WecGeometry(radius=5.5, height=5.5, tether_inclination=45.0, attachment_angle=45.0)


@pytest.fixture
def single_state_climate():
    return WaveClimate(states=(SeaState(hs=3.0, tp=8.0),), probabilities=(1.0,))


@pytest.fixture
def toy_climate():
    return WaveClimate(
        states=(SeaState(1.5, 7.0), SeaState(2.5, 9.0), SeaState(4.0, 11.0)),
        probabilities=(0.5, 0.3, 0.2),
    )


def random_geometry(rng) -> WecGeometry:
    radius = rng.uniform(5.0, 20.0)
    return WecGeometry(
        radius=radius,
        height=radius * rng.uniform(0.4, 1.5),
        tether_inclination=rng.uniform(10.0, 80.0),
        attachment_angle=rng.uniform(10.0, 80.0),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
