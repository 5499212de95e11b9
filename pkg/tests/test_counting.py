import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from d2d_coopnet.counting import (
    EnumerationBudgetExceeded, _compositions, approx_avg_coop, avg_ncoop, config_prob,
    coop_count, enumerate_avg_coop, exact_avg_coop, state_count,
)
from d2d_coopnet.montecarlo import request_statistics
from d2d_coopnet.popularity import ClusterConfig, PopularityModel, avg_cellular_users


def test_config_prob_single_group():
    assert config_prob(np.array([[3], [3]]), PopularityModel(2, 2, 1.0)) == pytest.approx(1.0)


def test_config_prob_binomial():
    m = PopularityModel(3, 1, 1.0)  # groups (6/11, 3/11, 2/11)
    p = m.group_probs
    assert config_prob(np.array([[1, 1, 0]]), m) == pytest.approx(2 * p[0] * p[1])


def test_config_probs_sum_to_one():
    m = PopularityModel(3, 1, 0.7)
    comps = _compositions(3, 3)
    total = sum(config_prob(np.array([a, b]), m) for a, b in itertools.product(comps, repeat=2))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_config_validation():
    m = PopularityModel(3, 1, 0.7)
    with pytest.raises(ValueError):
        config_prob(np.array([[1, 1, 0], [2, 1, 0]]), m)
    with pytest.raises(ValueError):
        config_prob(np.array([[1, 1]]), m)
    with pytest.raises(ValueError):
        coop_count(np.array([[-1, 2, 0]]), 2)


def test_coop_count_examples():
    counts = np.zeros((3, 4), dtype=int)
    counts[:, 0] = 2
    assert coop_count(counts, 2) == 6
    counts = np.array([[1, 1, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0]])
    assert coop_count(counts, 3) == 0


def _coop_count_reference(counts, K):
    """Direct transcription of the definition, loop by loop."""
    total = 0
    for k in range(K):
        if all(counts[i][k] > 0 for i in range(len(counts))):
            total += sum(counts[i][k] for i in range(len(counts)))
    return total


@settings(max_examples=100, deadline=None)
@given(data=st.data(), B=st.integers(1, 4), K=st.integers(1, 5), extra=st.integers(0, 3))
def test_coop_count_matches_reference(data, B, K, extra):
    K0 = K + extra
    rows = [data.draw(st.sampled_from(_compositions(K, K0).tolist())) for _ in range(B)]
    counts = np.array(rows)
    assert coop_count(counts, K) == _coop_count_reference(counts, K)


def test_compositions():
    c = _compositions(3, 3)
    assert len(c) == math.comb(5, 2)
    assert np.all(c.sum(axis=1) == 3)
    assert len({tuple(r) for r in c}) == len(c)


def test_exact_trivial_cases():
    m = PopularityModel(1, 1, 1.0)
    assert exact_avg_coop(ClusterConfig(7, 1), m) == pytest.approx(7.0)
    m = PopularityModel(300, 10, 0.9)
    cfg = ClusterConfig(12, 12)
    assert exact_avg_coop(cfg, m) == pytest.approx(12 * m.group_probs[:12].sum())


@pytest.mark.parametrize("B,K,K0,beta", [
    (2, 1, 3, 1.0), (2, 2, 4, 0.0), (2, 3, 5, 0.5), (2, 4, 5, 1.0), (3, 2, 3, 0.8),
    (3, 3, 4, 1.0), (4, 2, 5, 0.3), (1, 4, 5, 1.2),
])
def test_exact_equals_enumeration(B, K, K0, beta):
    m = PopularityModel(K0, 1, beta)
    cfg = ClusterConfig(B * K, K)
    assert state_count(cfg, m) <= 10**6
    assert exact_avg_coop(cfg, m) == pytest.approx(enumerate_avg_coop(cfg, m), rel=1e-12)


def test_enumeration_budget():
    m = PopularityModel(30, 1, 1.0)
    with pytest.raises(EnumerationBudgetExceeded):
        enumerate_avg_coop(ClusterConfig(180, 10), m)


def test_exact_against_request_sampling():
    m = PopularityModel(4, 1, 1.0)
    cfg = ClusterConfig(9, 3)
    draws = request_statistics(cfg, m, 1_000_000, np.random.default_rng(11), batch=50_000)
    se = draws["n_coop"].std(ddof=1) / 1000
    assert abs(draws["n_coop"].mean() - exact_avg_coop(cfg, m)) <= 3 * se


def test_approx_single_user_reduces_to_one_term():
    m = PopularityModel(60, 10, 1.0)
    cfg = ClusterConfig(9, 1)
    p1 = m.group_probs[0]
    assert approx_avg_coop(cfg, m) == pytest.approx(9 * p1 * p1 ** 8)
    assert approx_avg_coop(cfg, m) == pytest.approx(exact_avg_coop(cfg, m))


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0])
@pytest.mark.parametrize("K", [1, 2, 3, 4, 5])
def test_approx_accurate_with_many_clusters(K, beta):
    m = PopularityModel(6, 1, beta)
    cfg = ClusterConfig(9 * K, K)
    exact = exact_avg_coop(cfg, m)
    assert abs(approx_avg_coop(cfg, m) - exact) < 0.10 * exact


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0])
def test_approx_error_shrinks_with_cluster_count(beta):
    m = PopularityModel(6, 1, beta)
    errs = []
    for B in (2, 4, 6, 9):
        cfg = ClusterConfig(3 * B, 3)
        exact = exact_avg_coop(cfg, m)
        errs.append(abs(approx_avg_coop(cfg, m) - exact) / exact)
    assert errs == sorted(errs, reverse=True)


def test_printed_variant_underestimates():
    m = PopularityModel(6, 1, 0.5)
    cfg = ClusterConfig(27, 3)
    printed = approx_avg_coop(cfg, m, variant="printed")
    full = approx_avg_coop(cfg, m)
    assert printed <= full
    with pytest.raises(ValueError):
        approx_avg_coop(cfg, m, variant="other")


def test_avg_ncoop_examples():
    m = PopularityModel(1, 1, 0.0)
    assert avg_ncoop(ClusterConfig(6, 1), m) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        avg_ncoop(ClusterConfig(6, 1), m, method="guess")


def test_avg_ncoop_against_request_sampling():
    m = PopularityModel(4, 1, 0.0)
    cfg = ClusterConfig(9, 3)
    draws = request_statistics(cfg, m, 200_000, np.random.default_rng(12), batch=50_000)
    se = draws["n_ncoop"].std(ddof=1) / math.sqrt(200_000)
    assert abs(draws["n_ncoop"].mean() - avg_ncoop(cfg, m)) <= 3 * se


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0])
@pytest.mark.parametrize("K", [2, 5, 10, 15, 30])
def test_counts_partition_users(beta, K):
    m = PopularityModel(300, 10, beta)
    cfg = ClusterConfig(180, K)
    for method in ("exact", "approx"):
        nn = avg_ncoop(cfg, m, method)
        assert nn >= -1e-9
    nc = exact_avg_coop(cfg, m)
    assert nc + avg_ncoop(cfg, m) + avg_cellular_users(cfg, m) == pytest.approx(180.0)
