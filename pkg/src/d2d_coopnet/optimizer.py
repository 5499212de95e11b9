"""Bandwidth split and cluster size maximizing average D2D throughput under
per-class average user-rate floors."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import counting, linkrates
from .linkrates import RadioConfig
from .popularity import (ClusterConfig, PopularityModel, avg_cellular_users, coop_prob,
                         ncoop_activity)


@dataclass(frozen=True)
class EtaResult:
    eta: float
    feasible: bool
    lower: float
    upper: float
    increasing: bool


@dataclass(frozen=True)
class KRow:
    K: int
    B: int
    eta: float
    feasible: bool
    throughput: float
    n_coop: float
    n_ncoop: float
    n_cell: float
    coop_prob: float
    coop_se: float
    ncoop_se: float
    coop_user_rate: float
    ncoop_user_rate: float
    prop4_holds: bool
    ncoop_activity: float = 1.0

    @property
    def effective_ncoop_se(self) -> float:
        """N-Coop link rate weighted by the chance the link has a receiver."""
        return self.ncoop_se * self.ncoop_activity


@dataclass(frozen=True)
class OptimizationResult:
    best_K: int | None
    best_eta: float | None
    best_throughput: float | None
    per_K_table: list[KRow]

    @property
    def feasible(self) -> bool:
        return self.best_K is not None

    def row(self, K: int) -> KRow:
        return next(r for r in self.per_K_table if r.K == K)


def eta_bounds(radio: RadioConfig, mu: float, n_coop: float, n_ncoop: float,
               coop_se: float, ncoop_se: float) -> tuple[float, float]:
    """Interval of eta meeting both rate floors (may be empty)."""
    wb = radio.bandwidth * radio.cluster_count
    # a class with users but a zero link rate can only meet a zero floor
    if n_coop <= 0 or mu == 0:
        lower = 0.0
    else:
        lower = n_coop * mu / (wb * coop_se) if coop_se > 0 else math.inf
    if n_ncoop <= 0 or mu == 0:
        upper = 1.0
    else:
        upper = 1.0 - mu * n_ncoop / (wb * ncoop_se) if ncoop_se > 0 else -math.inf
    return lower, min(upper, 1.0)


def solve_eta(radio: RadioConfig, mu: float, n_coop: float, n_ncoop: float,
              coop_se: float, ncoop_se: float) -> EtaResult:
    """Closed-form optimal eta for fixed cluster size.

    Throughput is linear in eta with slope sign(coop_se - ncoop_se), so the
    optimum sits on the upper rate bound when Coop links are faster and on
    the lower one otherwise. With no Coop users the lower bound is vacuous
    and the upper bound is used.
    """
    lower, upper = eta_bounds(radio, mu, n_coop, n_ncoop, coop_se, ncoop_se)
    increasing = coop_se >= ncoop_se or n_coop == 0
    eta = upper if increasing else lower
    feasible = lower <= upper and upper > 0 and eta > 0
    if feasible:
        eta = min(max(eta, lower), upper)
    return EtaResult(eta, feasible, lower, upper, increasing)


def radio_for_clusters(radio: RadioConfig, hotspot_side: float, cluster_count: int) -> RadioConfig:
    return replace(radio, cluster_count=cluster_count,
                   cell_side=hotspot_side / math.sqrt(cluster_count))


def evaluate_K(K: int, model: PopularityModel, radio: RadioConfig, mu: float,
               total_users: int, hotspot_side: float, method: str = "exact",
               activity: bool = True, eta: float | None = None) -> KRow:
    """Rates, counts and optimal eta for one cluster size.

    A given ``eta`` replaces the optimal split; the row is then feasible
    when that split meets both rate floors.

    With ``activity`` the N-Coop link rate is weighted by the probability
    that the cluster has someone to serve on it; without it every cluster is
    assumed to run an N-Coop link, which makes single-user clusters look
    attractive although they can never form a D2D pair.
    """
    cfg = ClusterConfig(total_users, K)
    cfg.check_against(model)
    B = cfg.cluster_count
    r = radio_for_clusters(radio, hotspot_side, B)
    pc = coop_prob(cfg, model)
    if method == "exact":
        nc = counting.exact_avg_coop(cfg, model)
    else:
        nc = counting.approx_avg_coop(cfg, model)
    nb = avg_cellular_users(cfg, model)
    nn = max(0.0, total_users - nc - nb)
    rc = linkrates.coop_spectral_efficiency(r)
    act = ncoop_activity(cfg, model) if activity else 1.0
    rn_link = linkrates.ncoop_spectral_efficiency(r)
    rn = act * rn_link
    if eta is None:
        sol = solve_eta(r, mu, nc, nn, rc, rn)
        feasible, eta = sol.feasible, sol.eta
    else:
        if not 0 <= eta <= 1:
            raise ValueError("eta must lie in [0, 1]")
        lower, upper = eta_bounds(r, mu, nc, nn, rc, rn)
        slack = 1e-12
        feasible = lower - slack <= eta <= upper + slack
    if feasible:
        thr = linkrates.network_throughput(r, eta, pc, rc, rn)
        cu, nu = linkrates.user_rates(r, eta, nc, nn, rc, rn)
    else:
        eta = thr = cu = nu = float("nan")
    return KRow(K, B, eta, feasible, thr, nc, nn, nb, pc, rc, rn_link, cu, nu,
                linkrates.prop4_condition(r), act)


def eta_star(K: int, model: PopularityModel, radio: RadioConfig, mu: float,
             total_users: int, hotspot_side: float, method: str = "exact",
             activity: bool = True) -> EtaResult:
    row = evaluate_K(K, model, radio, mu, total_users, hotspot_side, method, activity)
    r = radio_for_clusters(radio, hotspot_side, row.B)
    return solve_eta(r, mu, row.n_coop, row.n_ncoop, row.coop_se, row.effective_ncoop_se)


def candidate_sizes(total_users: int, group_count: int) -> list[int]:
    return [k for k in range(1, min(total_users, group_count) + 1) if total_users % k == 0]


def optimize(model: PopularityModel, radio: RadioConfig, mu: float, total_users: int,
             hotspot_side: float, method: str = "exact",
             activity: bool = True) -> OptimizationResult:
    """Enumerate every admissible cluster size; ties go to the smaller K."""
    if total_users < 1:
        raise ValueError("total_users must be >= 1")
    table = [evaluate_K(K, model, radio, mu, total_users, hotspot_side, method, activity)
             for K in candidate_sizes(total_users, model.group_count)]
    best = None
    for row in table:
        if row.feasible and (best is None or row.throughput > best.throughput):
            best = row
    if best is None:
        return OptimizationResult(None, None, None, table)
    return OptimizationResult(best.K, best.eta, best.throughput, table)
