import numpy as np
import pytest

from secrecy_lab.channel import bsc, bsc_pair, from_marginals


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def degraded_pair():
    return bsc_pair(0.1, 0.2)


@pytest.fixture
def noiseless_y_bsc_z():
    """Y = X1 exactly, Z = BSC(0.3)(X1), no helper."""
    return from_marginals(np.eye(2)[:, None, :], bsc(0.3)[:, None, :])
