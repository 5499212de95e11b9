"""Closed-form average spectral efficiencies, throughput and per-user rates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class RadioConfig:
    """Radio parameters in linear units.

    Received power at distance d (meters) is
    ``tx_power * gain_constant * d**-pathloss_exponent``; ``gain_constant``
    is 1 for a pure power law and 10**(-intercept_dB/10) for log-distance.
    """

    tx_power: float
    noise_power: float
    bandwidth: float
    pathloss_exponent: float
    cell_side: float
    cluster_count: int
    min_distance: float = 1.0
    gain_constant: float = 1.0
    neighbors: int = geometry.DEFAULT_NEIGHBORS

    def __post_init__(self):
        for name in ("tx_power", "noise_power", "bandwidth", "cell_side", "min_distance",
                     "gain_constant"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.pathloss_exponent < 2:
            raise ValueError("pathloss_exponent must be >= 2")
        if self.cluster_count < 1:
            raise ValueError("cluster_count must be >= 1")
        if self.min_distance >= self.cell_side:
            raise ValueError("min_distance must be smaller than the cluster side")

    @property
    def r_min(self) -> float:
        return self.min_distance / self.cell_side

    def q1(self) -> float:
        return geometry.q1(self.pathloss_exponent, self.r_min, self.neighbors)

    def q2(self) -> float:
        return geometry.q2(self.pathloss_exponent, self.r_min)

    def gain(self, distance):
        """Path gain at ``distance`` meters, clamped to ``min_distance``."""
        d = np.maximum(np.asarray(distance, dtype=np.float64), self.min_distance)
        return self.gain_constant * d ** (-self.pathloss_exponent)

    def mean_gain_scale(self) -> float:
        """Received power of a unit normalized distance: P * c * D**-alpha."""
        return self.tx_power * self.gain_constant * self.cell_side ** (-self.pathloss_exponent)


@dataclass(frozen=True)
class RateReport:
    ncoop_se: float
    coop_se: float
    throughput: float
    ncoop_user_rate: float
    coop_user_rate: float
    prop4_holds: bool


def ncoop_spectral_efficiency(radio: RadioConfig) -> float:
    """Interference-limited N-Coop link rate in bits/s/Hz.

    Depends only on the path-loss exponent and the normalized cutoff; the
    trailing constant is log2 of the neighbor count.
    """
    return math.log2(radio.q1()) - math.log2(radio.q2()) - math.log2(radio.neighbors)


def coop_spectral_efficiency(radio: RadioConfig) -> float:
    snr = radio.mean_gain_scale() * radio.q1() / (radio.cluster_count * radio.noise_power)
    return math.log2(1.0 + snr)


def network_throughput(radio: RadioConfig, eta: float, coop_prob: float,
                       coop_se: float, ncoop_se: float) -> float:
    if not 0 <= eta <= 1:
        raise ValueError("eta must lie in [0, 1]")
    if not 0 <= coop_prob <= 1:
        raise ValueError("coop_prob must lie in [0, 1]")
    share = coop_prob * eta
    return radio.bandwidth * radio.cluster_count * (share * coop_se + (1 - share) * ncoop_se)


def user_rates(radio: RadioConfig, eta: float, n_coop: float, n_ncoop: float,
               coop_se: float, ncoop_se: float) -> tuple[float, float]:
    """Average (Coop, N-Coop) user rates under round robin.

    A class with no users has no rate to honor; its rate is reported as
    ``math.inf`` so any floor is trivially met.
    """
    wb = radio.bandwidth * radio.cluster_count
    coop = wb * eta * coop_se / n_coop if n_coop > 0 else math.inf
    ncoop = wb * (1 - eta) * ncoop_se / n_ncoop if n_ncoop > 0 else math.inf
    return coop, ncoop


def mean_interference(radio: RadioConfig) -> float:
    """Average interference at an N-Coop receiver from the neighbor ring."""
    return radio.neighbors * radio.mean_gain_scale() * radio.q2()


def prop4_condition(radio: RadioConfig) -> bool:
    """True when mean interference >= B * noise, which makes the Coop link
    rate no smaller than the N-Coop one."""
    return mean_interference(radio) >= radio.cluster_count * radio.noise_power


def rate_report(radio: RadioConfig, eta: float, coop_prob: float,
                n_coop: float, n_ncoop: float) -> RateReport:
    rn = ncoop_spectral_efficiency(radio)
    rc = coop_spectral_efficiency(radio)
    coop_u, ncoop_u = user_rates(radio, eta, n_coop, n_ncoop, rc, rn)
    return RateReport(
        ncoop_se=rn,
        coop_se=rc,
        throughput=network_throughput(radio, eta, coop_prob, rc, rn),
        ncoop_user_rate=ncoop_u,
        coop_user_rate=coop_u,
        prop4_holds=prop4_condition(radio),
    )
