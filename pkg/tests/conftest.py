import math

import pytest

from biphoton.correlation import PumpConfig
from biphoton.dispersion import CrystalConfig
from biphoton.phasematch import tune_collinear


@pytest.fixture(scope="session")
def bbo():
    """Default 4 mm BBO at 527.5 nm, 22.9 deg (bundled coefficient set)."""
    return CrystalConfig()


@pytest.fixture(scope="session")
def collinear(bbo):
    """Exactly tuned collinear configuration (degenerate mismatch ~ 0)."""
    angle = tune_collinear(bbo)
    assert angle is not None
    return bbo.replace(tuning_angle=angle)


@pytest.fixture(scope="session")
def noncollinear(bbo):
    """28 deg tuning: open emission cone, degenerate mismatch ~ 420."""
    return bbo.replace(tuning_angle=math.radians(28.0))


@pytest.fixture(scope="session")
def pump():
    return PumpConfig()


@pytest.fixture(scope="session")
def narrow_pump():
    """Pump sized so coarse oracle grids resolve the kernel in tests."""
    return PumpConfig(waist=60e-6, duration=40e-15)
