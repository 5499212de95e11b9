"""Command line front end: ``d2d-coopnet <command> --config FILE``.

Every command writes CSV with a fixed column order and 9 significant
digits. Exit status is 0 on success, 2 for configuration errors, 3 when no
cluster size meets the rate floors and 4 when a validation check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, stats

from . import counting, geometry, montecarlo, optimizer
from .config import ConfigError, SystemConfig, parse_config
from .popularity import avg_cellular_users, coop_prob

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_VALIDATION = 0, 2, 3, 4

ANALYZE_COLUMNS = (
    "beta", "K", "B", "eta", "feasible", "pc", "na_avg", "nc_exact", "nc_approx", "nn_avg",
    "n_cellular_avg", "coop_se", "ncoop_se", "ncoop_activity", "throughput_bps",
    "coop_user_rate_bps", "ncoop_user_rate_bps", "prop4_holds",
)
SIMULATE_COLUMNS = (
    "beta", "K", "B", "eta", "pc_analytic", "pc_sim", "na_avg", "nc_analytic", "nc_sim",
    "nn_analytic", "nn_sim", "nb_analytic", "nb_sim", "throughput_analytic_bps",
    "throughput_sim_bps", "throughput_ci_bps", "coop_user_rate_bps", "ncoop_user_rate_bps",
    "baseline_eta0_bps", "baseline_tdma_bps",
)
OPTIMIZE_COLUMNS = (
    "K", "B", "eta", "feasible", "throughput_bps", "nc_avg", "nn_avg", "nb_avg", "pc",
    "coop_se", "ncoop_se", "ncoop_activity", "coop_user_rate_bps", "ncoop_user_rate_bps",
    "prop4_holds", "best",
)
VALIDATE_COLUMNS = ("check_name", "analytic", "simulated", "tolerance", "pass")
SWEEP_KEYS = ("zipf_beta", "users_per_cluster", "num_users", "alpha", "rate_floor_bps")

# sample sizes of the validate command
VALIDATE_PDF_SAMPLES = 200_000
VALIDATE_REQUEST_DRAWS = 20_000
VALIDATE_LINK_SAMPLES = 2_000


class Infeasible(RuntimeError):
    """No admissible cluster size meets both rate floors."""


def fmt(value) -> str:
    """Locale-independent cell text: integers as is, floats with 9 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    x = float(value)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".9g")


def write_csv(stream, columns, rows) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row[c]) for c in columns])


# ---------------------------------------------------------------------------
# analytic side


def _evaluate(cfg: SystemConfig, K: int, eta: float | None = None) -> optimizer.KRow:
    return optimizer.evaluate_K(K, cfg.popularity(), cfg.radio(K), cfg.rate_floor_bps,
                                cfg.num_users, cfg.side_length_m, eta=eta)


def _optimize(cfg: SystemConfig) -> optimizer.OptimizationResult:
    K0 = cfg.popularity().group_count
    radio = cfg.radio(max(optimizer.candidate_sizes(cfg.num_users, K0)))
    return optimizer.optimize(cfg.popularity(), radio, cfg.rate_floor_bps,
                              cfg.num_users, cfg.side_length_m)


def _operating_point(cfg: SystemConfig) -> tuple[int, float]:
    """(K, eta) from the config, optimizing whatever is left unset."""
    if cfg.users_per_cluster is None:
        res = _optimize(cfg)
        if not res.feasible:
            raise Infeasible("no cluster size meets the rate floors")
        K = res.best_K
        eta = res.best_eta if cfg.eta is None else cfg.eta
        return K, eta
    K = cfg.users_per_cluster
    if cfg.eta is not None:
        return K, cfg.eta
    row = _evaluate(cfg, K)
    if not row.feasible:
        raise Infeasible(f"rate floors cannot be met at K={K}")
    return K, row.eta


def analyze_rows(cfg: SystemConfig) -> list[dict]:
    model = cfg.popularity()
    if cfg.users_per_cluster is None:
        sizes = optimizer.candidate_sizes(cfg.num_users, model.group_count)
    else:
        sizes = [cfg.users_per_cluster]
    rows = []
    for K in sizes:
        row = _evaluate(cfg, K, cfg.eta)
        clusters = cfg.clusters(K)
        rows.append({
            "beta": cfg.zipf_beta, "K": K, "B": row.B, "eta": row.eta,
            "feasible": row.feasible, "pc": row.coop_prob,
            "na_avg": row.B * row.coop_prob,
            "nc_exact": row.n_coop,
            "nc_approx": counting.approx_avg_coop(clusters, model),
            "nn_avg": row.n_ncoop, "n_cellular_avg": row.n_cell,
            "coop_se": row.coop_se,
            "ncoop_se": row.ncoop_se,
            "ncoop_activity": row.ncoop_activity, "throughput_bps": row.throughput,
            "coop_user_rate_bps": row.coop_user_rate,
            "ncoop_user_rate_bps": row.ncoop_user_rate, "prop4_holds": row.prop4_holds,
        })
    return rows


def optimize_rows(cfg: SystemConfig) -> tuple[list[dict], bool]:
    res = _optimize(cfg)
    rows = []
    for r in res.per_K_table:
        rows.append({
            "K": r.K, "B": r.B, "eta": r.eta, "feasible": r.feasible,
            "throughput_bps": r.throughput, "nc_avg": r.n_coop, "nn_avg": r.n_ncoop,
            "nb_avg": r.n_cell, "pc": r.coop_prob, "coop_se": r.coop_se,
            "ncoop_se": r.ncoop_se, "ncoop_activity": r.ncoop_activity,
            "coop_user_rate_bps": r.coop_user_rate, "ncoop_user_rate_bps": r.ncoop_user_rate,
            "prop4_holds": r.prop4_holds, "best": r.K == res.best_K,
        })
    return rows, res.feasible


# ---------------------------------------------------------------------------
# simulation side


def sim_settings(cfg: SystemConfig, eta: float) -> montecarlo.SimSettings:
    return montecarlo.SimSettings(
        eta=eta, drops=cfg.drops, fading_draws=cfg.fading_draws, seed=cfg.seed,
        coop_sinr_mode=cfg.coop_sinr_mode,
    )


def simulate_row(cfg: SystemConfig) -> dict:
    K, eta = _operating_point(cfg)
    model, clusters = cfg.popularity(), cfg.clusters(K)
    layout, radio = cfg.layout(K), cfg.radio(K)
    settings = sim_settings(cfg, eta)
    if cfg.coop_min_clusters is not None and cfg.coop_min_clusters <= clusters.cluster_count:
        rep = montecarlo.run_partial_coop(clusters, model, layout, radio, settings,
                                          cfg.coop_min_clusters)
    else:
        rep = montecarlo.run(clusters, model, layout, radio, settings)
    base = montecarlo.run(clusters, model, layout, radio, replace(settings, eta=0.0))
    tdma = montecarlo.run_baseline_tdma(clusters, model, layout, radio, settings)
    row = _evaluate(cfg, K, eta)
    throughput = row.throughput
    if not row.feasible:
        # the split misses a rate floor; report the objective value anyway
        pc, rc, rn = row.coop_prob, row.coop_se, row.effective_ncoop_se
        throughput = optimizer.linkrates.network_throughput(radio, eta, pc, rc, rn)
    return {
        "beta": cfg.zipf_beta, "K": K, "B": clusters.cluster_count, "eta": eta,
        "pc_analytic": row.coop_prob, "pc_sim": rep.coop_prob, "na_avg": rep.n_active,
        "nc_analytic": row.n_coop, "nc_sim": rep.n_coop,
        "nn_analytic": row.n_ncoop, "nn_sim": rep.n_ncoop,
        "nb_analytic": row.n_cell, "nb_sim": rep.n_cell,
        "throughput_analytic_bps": throughput, "throughput_sim_bps": rep.throughput,
        "throughput_ci_bps": rep.throughput_ci, "coop_user_rate_bps": rep.coop_user_rate,
        "ncoop_user_rate_bps": rep.ncoop_user_rate, "baseline_eta0_bps": base.throughput,
        "baseline_tdma_bps": tdma.throughput,
    }


def sweep_rows(cfg: SystemConfig, key: str, values: list[str]) -> list[dict]:
    if key not in SWEEP_KEYS:
        raise ConfigError(f"sweep key must be one of {SWEEP_KEYS}, got {key!r}")
    rows = []
    for text in values:
        point = cfg.with_value(key, text)
        if key == "num_users" and point.users_per_cluster is not None:
            if point.num_users % point.users_per_cluster:
                raise ConfigError(f"users_per_cluster {point.users_per_cluster} "
                                  f"must divide num_users {point.num_users}")
        row = simulate_row(point)
        rows.append({key: getattr(point, key), **row})
    return rows


# ---------------------------------------------------------------------------
# validation matrix


@dataclass(frozen=True)
class Check:
    name: str
    analytic: float
    simulated: float
    tolerance: float
    passed: bool

    def as_row(self) -> dict:
        return {"check_name": self.name, "analytic": self.analytic,
                "simulated": self.simulated, "tolerance": self.tolerance,
                "pass": self.passed}


def _abs_check(name, analytic, simulated, tol) -> Check:
    return Check(name, analytic, simulated, tol, abs(analytic - simulated) <= tol)


def _rel_check(name, analytic, simulated, tol) -> Check:
    return Check(name, analytic, simulated, tol, abs(analytic - simulated) <= tol * abs(simulated))


def _sigma_check(name, analytic, samples, span, k=3.0) -> Check:
    """``analytic`` within k standard errors of the sample mean.

    ``span`` bounds a single sample. When events are too rare to show up in
    n draws the standard error collapses to zero, so the tolerance never
    drops below the rule-of-three resolution 3 * span / n.
    """
    samples = np.asarray(samples, dtype=np.float64)
    mean = float(samples.mean())
    n = len(samples)
    tol = max(k * float(samples.std(ddof=1)) / math.sqrt(n), 3.0 * span / n)
    return Check(name, analytic, mean, tol, abs(analytic - mean) <= tol)


def validation_checks(cfg: SystemConfig) -> list[Check]:
    rng = lambda stream: montecarlo.stream_rng(cfg.seed, 100 + stream, 0)
    checks = []
    g_int = sum(integrate.quad(geometry.intra_pdf, a, b)[0]
                for a, b in [(0, 1), (1, geometry.SQRT2)])
    f_int = sum(integrate.quad(geometry.inter_pdf, a, b)[0]
                for a, b in [(0, 1), (1, geometry.SQRT2), (geometry.SQRT2, 2), (2, geometry.SQRT5)])
    checks.append(_abs_check("intra_pdf_normalization", g_int, 1.0, 1e-6))
    checks.append(_abs_check("inter_pdf_normalization", f_int, 1.0, 1e-6))
    ks_g = stats.kstest(geometry.sample_intra(rng(0), VALIDATE_PDF_SAMPLES), geometry.intra_cdf)
    ks_f = stats.kstest(geometry.sample_inter(rng(1), VALIDATE_PDF_SAMPLES), geometry.inter_cdf)
    checks.append(Check("intra_pdf_ks", 0.0, ks_g.statistic, 0.01, ks_g.statistic < 0.01))
    checks.append(Check("inter_pdf_ks", 0.0, ks_f.statistic, 0.01, ks_f.statistic < 0.01))

    K = cfg.users_per_cluster or _default_validation_K(cfg)
    for i, beta in enumerate((0.0, 0.5, 1.0)):
        point = replace(cfg, zipf_beta=beta, users_per_cluster=K)
        model, clusters = point.popularity(), point.clusters()
        draws = montecarlo.request_statistics(clusters, model, VALIDATE_REQUEST_DRAWS, rng(10 + i))
        nc = counting.exact_avg_coop(clusters, model)
        nb = avg_cellular_users(clusters, model)
        tag = f"beta{beta:g}_K{K}"
        M = cfg.num_users
        checks.append(_sigma_check(f"pc_{tag}", coop_prob(clusters, model), draws["mode1"], 1))
        checks.append(_sigma_check(f"nc_{tag}", nc, draws["n_coop"], M))
        checks.append(_sigma_check(f"nn_{tag}", M - nc - nb, draws["n_ncoop"], M))
        checks.append(_sigma_check(f"nb_{tag}", nb, draws["n_cell"], M))

    # rate formulas are checked where they are meant to hold: power-law
    # path loss, alpha = 3, nine clusters
    rate_cfg = replace(cfg, pathloss="powerlaw", alpha=3.0, num_users=9, users_per_cluster=1,
                       catalog_size=cfg.cache_size, zipf_beta=0.0, eta=None,
                       coop_min_clusters=None)
    radio, layout = rate_cfg.radio(), rate_cfg.layout()
    link = montecarlo.link_level_rates(layout, radio, VALIDATE_LINK_SAMPLES, rng(20))
    rn = optimizer.linkrates.ncoop_spectral_efficiency(radio)
    rc = optimizer.linkrates.coop_spectral_efficiency(radio)
    checks.append(_rel_check("ncoop_se_powerlaw_a3_B9", rn, float(link["ncoop"].mean()), 0.15))
    checks.append(_rel_check("coop_se_powerlaw_a3_B9", rc, float(link["coop_approx"].mean()), 0.15))
    return checks


def _default_validation_K(cfg: SystemConfig) -> int:
    """Largest admissible cluster size not above 10."""
    sizes = optimizer.candidate_sizes(cfg.num_users, cfg.popularity().group_count)
    return max(k for k in sizes if k <= 10)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="d2d-coopnet", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=("analyze", "simulate", "optimize", "validate", "sweep"))
    parser.add_argument("--config", required=True, help="key = value scenario file")
    parser.add_argument("--sweep-key", choices=SWEEP_KEYS, help="parameter to sweep")
    parser.add_argument("--values", help="comma separated sweep values")
    parser.add_argument("--out", help="write CSV here instead of standard output")
    return parser


def run_command(args: argparse.Namespace, stream) -> int:
    cfg = parse_config(args.config)
    status = EXIT_OK
    if args.command == "analyze":
        write_csv(stream, ANALYZE_COLUMNS, analyze_rows(cfg))
    elif args.command == "optimize":
        rows, feasible = optimize_rows(cfg)
        write_csv(stream, OPTIMIZE_COLUMNS, rows)
        status = EXIT_OK if feasible else EXIT_INFEASIBLE
    elif args.command == "simulate":
        write_csv(stream, SIMULATE_COLUMNS, [simulate_row(cfg)])
    elif args.command == "validate":
        checks = validation_checks(cfg)
        write_csv(stream, VALIDATE_COLUMNS, [c.as_row() for c in checks])
        status = EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION
    else:
        if not args.sweep_key or args.values is None:
            raise ConfigError("sweep needs --sweep-key and --values")
        values = [v.strip() for v in args.values.split(",") if v.strip()]
        if not values:
            raise ConfigError("--values is empty")
        write_csv(stream, (args.sweep_key,) + SIMULATE_COLUMNS,
                  sweep_rows(cfg, args.sweep_key, values))
    return status


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    buffer = io.StringIO()
    try:
        status = run_command(args, buffer)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    text = buffer.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
