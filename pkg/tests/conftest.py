import numpy as np
import pytest

from qoctsim import BiphotonSpectrum, SampleResponse

OMEGA0_810NM = 2.3254957621096954  # rad/fs


@pytest.fixture
def spec_case1():
    """Degenerate narrow-pump spectrum used by most pipeline fixtures."""
    return BiphotonSpectrum(omega0=OMEGA0_810NM, delta=0.002, big_delta=0.2)


@pytest.fixture
def sample_plain():
    return SampleResponse(r=np.sqrt(0.5), group_delay=10.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
