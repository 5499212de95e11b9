"""Zipf content popularity, file grouping and request-driven probabilities."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# products over more factors than this are taken in log space
_LOG_PRODUCT_THRESHOLD = 64


@dataclass(frozen=True)
class PopularityModel:
    """Catalog of ``catalog_size`` files ranked by popularity, split into
    groups of ``cache_size`` consecutive files."""

    catalog_size: int
    cache_size: int
    zipf_beta: float
    pmf: np.ndarray = field(init=False, repr=False, compare=False)
    group_probs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.catalog_size < 1:
            raise ValueError("catalog_size must be >= 1")
        if not 1 <= self.cache_size <= self.catalog_size:
            raise ValueError("cache_size must satisfy 1 <= cache_size <= catalog_size")
        if self.catalog_size % self.cache_size:
            raise ValueError(
                f"cache_size {self.cache_size} must divide catalog_size {self.catalog_size}"
            )
        if not np.isfinite(self.zipf_beta) or self.zipf_beta < 0:
            raise ValueError("zipf_beta must be a finite value >= 0")
        ranks = np.arange(1, self.catalog_size + 1, dtype=np.float64)
        weights = ranks ** (-float(self.zipf_beta))
        pmf = weights / weights.sum()
        groups = pmf.reshape(self.group_count, self.cache_size).sum(axis=1)
        pmf.setflags(write=False)
        groups.setflags(write=False)
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "group_probs", groups)

    @property
    def group_count(self) -> int:
        return self.catalog_size // self.cache_size

    def group_of(self, file_index):
        """1-based group index of 1-based file index(es)."""
        return (np.asarray(file_index) - 1) // self.cache_size + 1


@dataclass(frozen=True)
class ClusterConfig:
    total_users: int
    users_per_cluster: int

    def __post_init__(self):
        if self.total_users < 1 or self.users_per_cluster < 1:
            raise ValueError("total_users and users_per_cluster must be >= 1")
        if self.total_users % self.users_per_cluster:
            raise ValueError(
                f"users_per_cluster {self.users_per_cluster} must divide "
                f"total_users {self.total_users}"
            )

    @property
    def cluster_count(self) -> int:
        return self.total_users // self.users_per_cluster

    def check_against(self, model: PopularityModel) -> None:
        if self.users_per_cluster > model.group_count:
            raise ValueError(
                f"users_per_cluster {self.users_per_cluster} exceeds group count "
                f"{model.group_count}"
            )


def zipf_pmf(i: int, model: PopularityModel) -> float:
    if not 1 <= i <= model.catalog_size:
        raise ValueError(f"file index {i} outside 1..{model.catalog_size}")
    return float(model.pmf[i - 1])


def group_prob(k: int, model: PopularityModel) -> float:
    if not 1 <= k <= model.group_count:
        raise ValueError(f"group index {k} outside 1..{model.group_count}")
    return float(model.group_probs[k - 1])


def _pow_complement(p, n: int):
    """(1 - p)**n, computed in log space for large n."""
    p = np.asarray(p, dtype=np.float64)
    if n <= _LOG_PRODUCT_THRESHOLD:
        return (1.0 - p) ** n
    with np.errstate(divide="ignore"):
        return np.exp(n * np.log1p(-p))


def hit_prob(k: int, K: int, model: PopularityModel) -> float:
    """Probability that at least one of ``K`` users in a cluster requests group ``k``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    return float(1.0 - _pow_complement(group_prob(k, model), K))


def hit_probs(K: int, model: PopularityModel) -> np.ndarray:
    """Hit probabilities of the cached groups 1..K."""
    return 1.0 - _pow_complement(model.group_probs[:K], K)


def all_hit_probs(cfg: ClusterConfig, model: PopularityModel) -> np.ndarray:
    """Probability that every cluster hits group k, for k = 1..K."""
    ph = hit_probs(cfg.users_per_cluster, model)
    B = cfg.cluster_count
    if B <= _LOG_PRODUCT_THRESHOLD:
        return ph**B
    with np.errstate(divide="ignore"):
        return np.exp(B * np.log(ph))


def coop_prob(cfg: ClusterConfig, model: PopularityModel) -> float:
    """Probability that at least one cached group is hit by all clusters."""
    cfg.check_against(model)
    q = all_hit_probs(cfg, model)
    with np.errstate(divide="ignore"):
        log_none = np.sum(np.log1p(-q))
    return float(-np.expm1(log_none))


def avg_active_coop(cfg: ClusterConfig, model: PopularityModel) -> float:
    return cfg.cluster_count * coop_prob(cfg, model)


def avg_cellular_users(cfg: ClusterConfig, model: PopularityModel) -> float:
    cfg.check_against(model)
    # summing the uncached tail keeps K = K_0 exactly zero
    uncached = float(np.sum(model.group_probs[cfg.users_per_cluster :]))
    return cfg.total_users * uncached


def ncoop_activity(cfg: ClusterConfig, model: PopularityModel) -> float:
    """Probability that a cluster holds at least one D2D user whose group is
    cached by a different member, i.e. that its N-Coop link can be active.

    The user caching group k is such a user with probability S_K - P_k,
    where S_K is the cached request mass.
    """
    cfg.check_against(model)
    K = cfg.users_per_cluster
    p = model.group_probs[:K]
    served = np.clip(p.sum() - p, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        log_idle = np.sum(np.log1p(-served))
    return max(0.0, float(-np.expm1(log_idle)))
