"""Expected numbers of Coop, N-Coop and cellular users.

A request configuration is a B x K_0 matrix of counts n[i, k]: how many of
the K users of cluster i request a file in group k. Groups 1..K are cached;
group k is a hit group when every cluster has n[i, k] > 0, and all its
requesters are Coop users.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .popularity import ClusterConfig, PopularityModel, all_hit_probs, avg_cellular_users, hit_probs

DEFAULT_STATE_BUDGET = 10**8


class EnumerationBudgetExceeded(RuntimeError):
    """Raw enumeration would visit more states than allowed; use approx_avg_coop."""


def _check_config(counts: np.ndarray, K: int | None = None) -> np.ndarray:
    counts = np.asarray(counts)
    if counts.ndim != 2 or np.any(counts < 0):
        raise ValueError("counts must be a non-negative B x K_0 matrix")
    rows = counts.sum(axis=1)
    if np.any(rows != rows[0]) or (K is not None and rows[0] != K):
        raise ValueError("every cluster must hold the same number of users")
    return counts


def _log_multinomial(counts: np.ndarray, log_p: np.ndarray) -> np.ndarray:
    """Log multinomial probability of each row of ``counts``."""
    K = counts.sum(axis=-1)
    with np.errstate(invalid="ignore"):
        terms = np.where(counts > 0, counts * log_p, 0.0)
    return gammaln(K + 1) - gammaln(counts + 1).sum(axis=-1) + terms.sum(axis=-1)


def config_prob(counts, model: PopularityModel) -> float:
    counts = _check_config(counts)
    if counts.shape[1] != model.group_count:
        raise ValueError("counts must have one column per file group")
    with np.errstate(divide="ignore"):
        log_p = np.log(model.group_probs)
    return float(np.exp(_log_multinomial(counts, log_p).sum()))


def coop_count(counts, K: int) -> int:
    counts = _check_config(counts)
    cached = counts[:, :K]
    hit = np.all(cached > 0, axis=0)
    return int(cached[:, hit].sum())


@lru_cache(maxsize=64)
def _compositions(K: int, parts: int) -> np.ndarray:
    """All length-``parts`` non-negative integer vectors summing to K."""
    rows = []
    for bars in itertools.combinations(range(K + parts - 1), parts - 1):
        prev = -1
        row = []
        for b in bars:
            row.append(b - prev - 1)
            prev = b
        row.append(K + parts - 2 - prev)
        rows.append(row)
    out = np.array(rows, dtype=np.int64).reshape(-1, parts)
    out.setflags(write=False)
    return out


def state_count(cfg: ClusterConfig, model: PopularityModel) -> int:
    """Size of the configuration space enumerated by ``enumerate_avg_coop``."""
    per_cluster = math.comb(cfg.users_per_cluster + model.group_count - 1, cfg.users_per_cluster)
    return per_cluster**cfg.cluster_count


def enumerate_avg_coop(cfg: ClusterConfig, model: PopularityModel,
                       budget: int = DEFAULT_STATE_BUDGET, chunk: int = 1 << 16) -> float:
    """Expected Coop users by visiting every request configuration.

    Kept deliberately naive: it is the reference the faster forms are
    checked against.
    """
    cfg.check_against(model)
    n_states = state_count(cfg, model)
    if n_states > budget:
        raise EnumerationBudgetExceeded(
            f"{n_states} configurations exceed the budget of {budget}; use approx_avg_coop"
        )
    K, B = cfg.users_per_cluster, cfg.cluster_count
    comps = _compositions(K, model.group_count)
    with np.errstate(divide="ignore"):
        log_p = np.log(model.group_probs)
    comp_logp = _log_multinomial(comps, log_p)
    n_comp = len(comps)
    total = 0.0
    for start in range(0, n_states, chunk):
        flat = np.arange(start, min(start + chunk, n_states))
        idx = np.stack(np.unravel_index(flat, (n_comp,) * B), axis=1)  # (S, B)
        counts = comps[idx]  # (S, B, K_0)
        prob = np.exp(comp_logp[idx].sum(axis=1))
        cached = counts[:, :, :K]
        hit = np.all(cached > 0, axis=1)  # (S, K)
        n_coop = np.where(hit, cached.sum(axis=1), 0).sum(axis=1)
        total += float(np.dot(prob, n_coop))
    return total


def exact_avg_coop(cfg: ClusterConfig, model: PopularityModel) -> float:
    """Exact expected number of Coop users.

    Clusters draw requests independently, so for a cached group k
    E[n_ik * 1{all clusters hit k}] = K P_k (P^h_k)^(B-1), and the count
    follows by linearity.
    """
    cfg.check_against(model)
    K, B = cfg.users_per_cluster, cfg.cluster_count
    p = model.group_probs[:K]
    ph = hit_probs(K, model)
    with np.errstate(divide="ignore"):
        others = np.exp((B - 1) * np.log(ph)) if B > 1 else np.ones_like(ph)
    return float(B * K * np.sum(p * others))


def _pair_requester_mean(p1: float, p2: float, K: int, variant: str) -> float:
    """Expected m1 + m2 over in-cluster splits with both groups requested."""
    total = 0.0
    rest = max(0.0, 1.0 - p1 - p2)
    for m in range(2, K + 1):
        for m1 in range(1, m):
            m2 = m - m1
            if variant == "printed":
                coef = math.comb(m, m1)
                w = coef * p1**m1 * p2**m2
            else:
                coef = math.comb(K, m1) * math.comb(K - m1, m2)
                w = coef * p1**m1 * p2**m2 * rest ** (K - m)
            total += m * w
    return total


def approx_avg_coop(cfg: ClusterConfig, model: PopularityModel,
                    variant: str = "multinomial") -> float:
    """Expected Coop users keeping only outcomes with one or two hit groups.

    ``variant="multinomial"`` weighs each in-cluster split (m1, m2) of the
    two hit groups by its full multinomial probability.
    ``variant="printed"`` uses the reduced weight m!/(m1! m2!) p1^m1 p2^m2
    with no factor for the other K - m users; it is kept for comparison and
    underestimates the two-group share.
    """
    if variant not in ("multinomial", "printed"):
        raise ValueError(f"unknown variant {variant!r}")
    cfg.check_against(model)
    K, B = cfg.users_per_cluster, cfg.cluster_count
    p = model.group_probs[:K]
    ph = hit_probs(K, model)
    q = all_hit_probs(cfg, model)
    miss = 1.0 - q
    with np.errstate(divide="ignore"):
        ph_bm1 = np.exp((B - 1) * np.log(ph)) if B > 1 else np.ones_like(ph)

    single = 0.0
    for k in range(K):
        single += np.prod(np.delete(miss, k)) * ph_bm1[k] * B * p[k] * K

    pair = 0.0
    for k1, k2 in itertools.combinations(range(K), 2):
        weight = np.prod(np.delete(miss, [k1, k2])) * ph_bm1[k1] * ph_bm1[k2]
        if weight == 0.0:
            continue
        pair += weight * B * _pair_requester_mean(p[k1], p[k2], K, variant)
    return float(single + pair)


def avg_ncoop(cfg: ClusterConfig, model: PopularityModel, method: str = "exact") -> float:
    if method == "exact":
        n_coop = exact_avg_coop(cfg, model)
    elif method == "approx":
        n_coop = approx_avg_coop(cfg, model)
    else:
        raise ValueError(f"unknown method {method!r}")
    return cfg.total_users - n_coop - avg_cellular_users(cfg, model)
