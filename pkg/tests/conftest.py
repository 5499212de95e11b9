import math

import numpy as np
import pytest

from d2d_coopnet.linkrates import RadioConfig, dbm_to_watt


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def powerlaw_radio(B=9, alpha=3.0, side=100.0, **kw) -> RadioConfig:
    return RadioConfig(
        tx_power=dbm_to_watt(23), noise_power=dbm_to_watt(-100), bandwidth=20e6,
        pathloss_exponent=alpha, cell_side=side / math.sqrt(B), cluster_count=B, **kw,
    )


def logdistance_radio(B=9, side=100.0) -> RadioConfig:
    return powerlaw_radio(B, alpha=3.68, side=side, gain_constant=10 ** -3.76)
