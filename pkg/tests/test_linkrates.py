import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from d2d_coopnet.linkrates import (
    RadioConfig, coop_spectral_efficiency, dbm_to_watt, mean_interference,
    ncoop_spectral_efficiency, network_throughput, prop4_condition, rate_report, user_rates,
)
from conftest import logdistance_radio, powerlaw_radio


def test_dbm_conversion():
    assert dbm_to_watt(30) == pytest.approx(1.0)
    assert dbm_to_watt(23) == pytest.approx(0.19952623149688797)
    assert dbm_to_watt(-100) == pytest.approx(1e-13)


def test_radio_validation():
    with pytest.raises(ValueError):
        powerlaw_radio(alpha=1.5)
    with pytest.raises(ValueError):
        replace(powerlaw_radio(), tx_power=0.0)
    with pytest.raises(ValueError):
        powerlaw_radio(B=10_000)  # cell smaller than d_min


def test_gain_clamps_to_min_distance():
    r = powerlaw_radio()
    assert r.gain(0.0) == r.gain(1.0) == 1.0
    assert r.gain(2.0) == pytest.approx(2.0 ** -3)


def test_ncoop_rate_invariant_to_power():
    r = powerlaw_radio()
    assert ncoop_spectral_efficiency(replace(r, tx_power=2 * r.tx_power)) == \
        ncoop_spectral_efficiency(r)
    assert ncoop_spectral_efficiency(replace(r, noise_power=1e-3)) == \
        ncoop_spectral_efficiency(r)


def test_ncoop_rate_uses_neighbor_count():
    r = powerlaw_radio()
    expected = math.log2(r.q1()) - math.log2(r.q2()) - 3
    assert ncoop_spectral_efficiency(r) == pytest.approx(expected, abs=1e-12)


def test_rate_trends_in_alpha():
    alphas = np.linspace(2.5, 4.0, 7)
    rn = [ncoop_spectral_efficiency(powerlaw_radio(alpha=a)) for a in alphas]
    rc = [coop_spectral_efficiency(powerlaw_radio(alpha=a)) for a in alphas]
    assert np.all(np.diff(rn) > 0)
    assert np.all(np.diff(rc) < 0)


def test_coop_rate_limits_and_monotonicity():
    r = powerlaw_radio()
    assert coop_spectral_efficiency(replace(r, tx_power=1e-30)) == pytest.approx(0.0, abs=1e-9)
    assert coop_spectral_efficiency(replace(r, tx_power=2 * r.tx_power)) > \
        coop_spectral_efficiency(r)
    assert coop_spectral_efficiency(replace(r, cluster_count=16)) < coop_spectral_efficiency(r)


def test_throughput_reductions():
    r = powerlaw_radio()
    wb = r.bandwidth * r.cluster_count
    assert network_throughput(r, 0.0, 0.7, 20.0, 2.0) == pytest.approx(wb * 2.0)
    assert network_throughput(r, 1.0, 1.0, 20.0, 2.0) == pytest.approx(wb * 20.0)
    with pytest.raises(ValueError):
        network_throughput(r, 1.5, 0.5, 1, 1)
    with pytest.raises(ValueError):
        network_throughput(r, 0.5, -0.1, 1, 1)


def test_throughput_derivative_by_finite_differences():
    r = powerlaw_radio()
    pc, rc, rn, eta, h = 0.8, 25.0, 2.0, 0.4, 1e-6
    fd = (network_throughput(r, eta + h, pc, rc, rn) - network_throughput(r, eta - h, pc, rc, rn)) / (2 * h)
    exact = r.bandwidth * r.cluster_count * pc * (rc - rn)
    assert fd == pytest.approx(exact, rel=1e-9)


def test_user_rates_examples():
    r = powerlaw_radio()
    assert user_rates(r, 1.0, 10, 20, 5.0, 2.0)[1] == 0.0
    c, n = user_rates(r, 0.5, 12, 12, 3.0, 3.0)
    assert c == pytest.approx(n)
    c, n = user_rates(r, 0.5, 0, 0, 3.0, 3.0)
    assert c == math.inf and n == math.inf


def test_user_rates_pairing():
    # the Coop class is paid from the Coop link rate
    r = powerlaw_radio()
    c, n = user_rates(r, 0.25, 4.0, 8.0, 30.0, 2.0)
    wb = r.bandwidth * r.cluster_count
    assert c == pytest.approx(wb * 0.25 * 30.0 / 4.0)
    assert n == pytest.approx(wb * 0.75 * 2.0 / 8.0)


def test_prop4_examples():
    r = powerlaw_radio()
    assert prop4_condition(replace(r, noise_power=1e-300))
    assert not prop4_condition(replace(r, tx_power=1e-30))
    for radio in (r, logdistance_radio()):
        assert prop4_condition(radio)
        assert coop_spectral_efficiency(radio) >= ncoop_spectral_efficiency(radio)


def test_mean_interference_formula():
    r = powerlaw_radio()
    assert mean_interference(r) == pytest.approx(8 * r.tx_power * r.cell_side ** -3 * r.q2())


def test_rate_report_consistency():
    r = logdistance_radio()
    rep = rate_report(r, 0.6, 0.9, 50.0, 60.0)
    assert rep.throughput == pytest.approx(
        network_throughput(r, 0.6, 0.9, rep.coop_se, rep.ncoop_se))
    assert min(rep.ncoop_se, rep.coop_se, rep.throughput) >= 0


def _radio(p_dbm, n_dbm, alpha, B):
    return replace(powerlaw_radio(B=B, alpha=alpha), tx_power=dbm_to_watt(p_dbm),
                   noise_power=dbm_to_watt(n_dbm))


radios = st.builds(_radio, st.floats(-30, 40), st.floats(-140, -40), st.floats(2.0, 5.0),
                   st.sampled_from([1, 4, 9, 16, 25]))


@settings(max_examples=60, deadline=None)
@given(radio=radios)
def test_prop4_implies_rate_ordering(radio):
    if prop4_condition(radio):
        assert coop_spectral_efficiency(radio) >= ncoop_spectral_efficiency(radio) - 1e-12


@settings(max_examples=60, deadline=None)
@given(radio=radios, pc=st.floats(0.0, 1.0))
def test_throughput_monotone_in_eta_iff_coop_faster(radio, pc):
    rc, rn = coop_spectral_efficiency(radio), ncoop_spectral_efficiency(radio)
    vals = [network_throughput(radio, e, pc, rc, rn) for e in np.linspace(0, 1, 11)]
    steps = np.diff(vals)
    scale = 1e-9 * max(abs(v) for v in vals)
    if rc >= rn:
        assert np.all(steps >= -scale)
    elif pc > 0:
        assert np.any(steps < 0)
