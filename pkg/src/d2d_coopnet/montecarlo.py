"""Monte Carlo simulation of opportunistic cooperative D2D transmission.

One *drop* fixes user positions, cache contents and requests. Within a drop
each of ``fading_draws`` slots draws a schedule (one Coop and one N-Coop
link per cluster) and an independent Rayleigh fading realization.

Every drop has its own random stream derived from ``(seed, stream, drop)``,
so results do not depend on how drops are spread over workers.
"""

from __future__ import annotations

import logging
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .geometry import ClusterLayout
from .linkrates import RadioConfig
from .popularity import ClusterConfig, PopularityModel

log = logging.getLogger(__name__)

COOP, NCOOP, CELLULAR = 0, 1, 2

MAX_CONDITION = 1e8
MAX_REDRAWS = 10
MIN_BATCHES = 30

# stream ids keep runs that share a seed on separate random streams where
# that matters, and on shared streams (common random numbers) where it helps
STREAM_DROPS = 0
STREAM_SLOTS = 1
STREAM_TDMA = 2


@dataclass(frozen=True)
class Drop:
    """One network realization.

    Users are stored flat and ordered by cluster; ``members`` is a padded
    (B, K_max) table of user indices with -1 for empty slots.
    """

    positions: np.ndarray
    cluster: np.ndarray
    cached_group: np.ndarray
    requests: np.ndarray
    groups: np.ndarray
    members: np.ndarray
    cacher: np.ndarray
    users_per_cluster: int
    labels: np.ndarray | None = None
    hit_groups: tuple[int, ...] = ()
    participants: dict = field(default_factory=dict)

    @property
    def cluster_count(self) -> int:
        return self.members.shape[0]

    @property
    def mode(self) -> int:
        return 1 if self.hit_groups else 0

    def counts(self) -> tuple[int, int, int]:
        """(Coop, N-Coop, cellular) user counts."""
        c = np.bincount(self.labels, minlength=3)
        return int(c[COOP]), int(c[NCOOP]), int(c[CELLULAR])


def stream_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(stream, index))
    return np.random.Generator(np.random.PCG64(ss))


def generate_drop(layout: ClusterLayout, model: PopularityModel, cfg: ClusterConfig,
                  rng: np.random.Generator, uniform_placement: bool = False,
                  coop_min_clusters: int | None = None) -> Drop:
    """Place users, assign caches, draw Zipf requests and classify.

    By default exactly K users fall uniformly in each cell. With
    ``uniform_placement`` all M users are uniform over the hotspot and join
    the cell they land in; a cell then caches groups 1..min(n_i, K).
    """
    B, K, M = cfg.cluster_count, cfg.users_per_cluster, cfg.total_users
    if layout.cluster_count != B:
        raise ValueError("layout and cluster config disagree on the cluster count")
    origins = layout.cell_origins()
    cell = np.array([layout.cell_width, layout.cell_height])
    if uniform_placement:
        pts = rng.random((M, 2)) * layout.hotspot_side
        col = np.minimum((pts[:, 0] // layout.cell_width).astype(int), layout.grid_x - 1)
        row = np.minimum((pts[:, 1] // layout.cell_height).astype(int), layout.grid_y - 1)
        cl = row * layout.grid_x + col
        order = np.argsort(cl, kind="stable")
        positions, cluster = pts[order], cl[order]
    else:
        cluster = np.repeat(np.arange(B), K)
        positions = origins[cluster] + rng.random((M, 2)) * cell

    sizes = np.bincount(cluster, minlength=B)
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    slot = np.arange(M) - starts[cluster]
    width = max(1, int(sizes.max()))
    members = np.full((B, width), -1, dtype=np.int64)
    members[cluster, slot] = np.arange(M)
    cached_group = np.where(slot < K, slot + 1, 0)
    cacher = np.full((B, K + 1), -1, dtype=np.int64)
    has = cached_group > 0
    cacher[cluster[has], cached_group[has]] = np.flatnonzero(has)

    requests = rng.choice(model.catalog_size, size=M, p=model.pmf) + 1
    groups = model.group_of(requests)
    drop = Drop(positions, cluster, cached_group, requests, groups, members, cacher, K)
    return classify(drop, coop_min_clusters)


def classify(drop: Drop, coop_min_clusters: int | None = None) -> Drop:
    """Label users Coop / N-Coop / cellular and find the hit groups.

    A cached group is a hit group when at least ``coop_min_clusters``
    clusters (default: all) have a requester for it and no other cached
    group is requested in more clusters; cooperation always uses the
    largest cluster set available. Requesters of a hit group in its
    participating clusters are Coop users.
    """
    B, K = drop.cluster_count, drop.users_per_cluster
    threshold = B if coop_min_clusters is None else coop_min_clusters
    if not 1 <= threshold <= B:
        raise ValueError("coop_min_clusters must lie in 1..B")
    g = drop.groups
    in_range = g <= K
    d2d = np.zeros(len(g), dtype=bool)
    d2d[in_range] = drop.cacher[drop.cluster[in_range], g[in_range]] >= 0
    hits = np.zeros((B, K + 1), dtype=bool)
    hits[drop.cluster[d2d], g[d2d]] = True
    n_hit = hits.sum(axis=0)
    n_hit[0] = 0
    best = int(n_hit.max())
    hit_groups = tuple(int(k) for k in np.flatnonzero(n_hit == best)) if best >= threshold else ()
    participants = {k: np.flatnonzero(hits[:, k]) for k in hit_groups}
    labels = np.full(len(g), CELLULAR, dtype=np.int64)
    labels[d2d] = NCOOP
    for k in hit_groups:
        labels[d2d & (g == k) & hits[drop.cluster, k]] = COOP
    return replace(drop, labels=labels, hit_groups=hit_groups, participants=participants)


@dataclass(frozen=True)
class Schedule:
    """Links for ``F`` slots.

    ``ncoop_rx[f, i]`` is the N-Coop receiver of cluster i in slot f (-1 when
    idle) and ``ncoop_tx`` its transmitter. ``coop_group[f]`` is the served
    hit group (0 when the Coop band is off) with ``coop_rx``/``coop_tx``
    laid out like the N-Coop arrays.
    """

    ncoop_rx: np.ndarray
    ncoop_tx: np.ndarray
    coop_group: np.ndarray
    coop_rx: np.ndarray
    coop_tx: np.ndarray
    coop_band: bool


def _pick_per_cluster(eligible: np.ndarray, members: np.ndarray, rng, slots: int) -> np.ndarray:
    """Uniform choice of one eligible member per (slot, cluster); -1 if none.

    ``eligible`` has shape (slots, B, K_max) or (B, K_max).
    """
    keys = rng.random((slots,) + members.shape)
    eligible = np.broadcast_to(eligible, keys.shape) & (members >= 0)
    keys = np.where(eligible, keys, -1.0)
    best = keys.argmax(axis=2)
    chosen = np.take_along_axis(np.broadcast_to(members, keys.shape), best[..., None], 2)[..., 0]
    return np.where(keys.max(axis=2) >= 0, chosen, -1)


def _own_transmitter(drop: Drop, users: np.ndarray) -> np.ndarray:
    """In-cluster cacher of each user's requested group (-1 for padding)."""
    safe = np.where(users >= 0, users, 0)
    g = np.minimum(drop.groups[safe], drop.users_per_cluster)
    tx = drop.cacher[drop.cluster[safe], g]
    return np.where(users >= 0, tx, -1)


def schedule(drop: Drop, rng: np.random.Generator, eta: float = 0.5, slots: int = 1) -> Schedule:
    """Draw ``slots`` independent schedules.

    The Coop band is on in Mode 1 with ``eta > 0``; a hit group is picked
    uniformly per slot and each participating cluster serves one uniformly
    chosen requester from the group's cacher. Without the Coop band every
    D2D user competes for the N-Coop link. A user that caches its own
    request is never its own receiver; if no other candidate exists the
    cluster idles on that band.
    """
    members = drop.members
    B = drop.cluster_count
    safe = np.where(members >= 0, members, 0)
    labels = drop.labels[safe]
    not_self = _own_transmitter(drop, members) != members
    coop_band = bool(drop.hit_groups) and eta > 0

    ncoop_ok = (labels == NCOOP) if coop_band else (labels != CELLULAR)
    ncoop_rx = _pick_per_cluster(ncoop_ok & not_self, members, rng, slots)
    ncoop_tx = _own_transmitter(drop, ncoop_rx)

    coop_group = np.zeros(slots, dtype=np.int64)
    coop_rx = np.full((slots, B), -1, dtype=np.int64)
    if coop_band:
        hit = np.asarray(drop.hit_groups)
        coop_group = hit[rng.integers(len(hit), size=slots)]
        req = drop.groups[safe]
        ok = (labels == COOP)[None] & (req[None] == coop_group[:, None, None]) & not_self[None]
        coop_rx = _pick_per_cluster(ok, members, rng, slots)
    coop_tx = _own_transmitter(drop, coop_rx)
    return Schedule(ncoop_rx, ncoop_tx, coop_group, coop_rx, coop_tx, coop_band)


def ncoop_sinr(drop: Drop, rx: np.ndarray, tx: np.ndarray, radio: RadioConfig,
               rng: np.random.Generator) -> np.ndarray:
    """SINR of every active N-Coop link, shape (F, B), 0 where idle.

    Interference is summed over all other active transmitters on the band.
    """
    active = rx >= 0
    rx_pos = drop.positions[np.where(active, rx, 0)]
    tx_pos = drop.positions[np.where(active, tx, 0)]
    return _interference_sinr(rx_pos, tx_pos, active, radio, rng)


def _interference_sinr(rx_pos, tx_pos, active, radio: RadioConfig, rng) -> np.ndarray:
    d = np.linalg.norm(rx_pos[:, :, None, :] - tx_pos[:, None, :, :], axis=-1)
    power = radio.tx_power * radio.gain(d) * rng.exponential(size=d.shape)
    power = np.where(active[:, None, :] & active[:, :, None], power, 0.0)
    signal = np.diagonal(power, axis1=1, axis2=2)
    interference = power.sum(axis=2) - signal
    return np.where(active, signal / (interference + radio.noise_power), 0.0)


def composite_channel(rx_pos: np.ndarray, tx_pos: np.ndarray, radio: RadioConfig,
                      rng: np.random.Generator) -> np.ndarray:
    """c x c matrix of sqrt(path gain) times unit complex Gaussian fading;
    row i is receiver i, column j transmitter j."""
    d = np.linalg.norm(rx_pos[:, None, :] - tx_pos[None, :, :], axis=-1)
    h = (rng.standard_normal(d.shape) + 1j * rng.standard_normal(d.shape)) / np.sqrt(2.0)
    return np.sqrt(radio.gain(d)) * h


def coop_sinr(H: np.ndarray, radio: RadioConfig, mode: str = "zf-exact") -> np.ndarray:
    """Per-receiver SINR of joint transmission over channel ``H``.

    ``zf-exact`` inverts H under a total power of c * P shared so that all
    streams see the same gain c P / ||H^-1||_F^2. ``paper-approx`` replaces
    the zero-forcing loss by the factor 1/c applied to each receiver's full
    channel energy.
    """
    c = H.shape[0]
    if mode == "paper-approx":
        return radio.tx_power * np.sum(np.abs(H) ** 2, axis=1) / (c * radio.noise_power)
    if mode != "zf-exact":
        raise ValueError(f"unknown coop SINR mode {mode!r}")
    inv = np.linalg.inv(H)
    gain = c * radio.tx_power / np.sum(np.abs(inv) ** 2)
    return np.full(c, gain / radio.noise_power)


class SingularChannel(RuntimeError):
    pass


def _coop_rates(drop: Drop, sched: Schedule, radio: RadioConfig, rng, mode: str):
    """Coop spectral efficiencies (F, B) and the number of fading redraws."""
    F, B = sched.coop_rx.shape
    rates = np.zeros((F, B))
    redraws = 0
    for f in range(F):
        active = np.flatnonzero(sched.coop_rx[f] >= 0)
        if active.size == 0:
            continue
        rx_pos = drop.positions[sched.coop_rx[f, active]]
        tx_pos = drop.positions[sched.coop_tx[f, active]]
        for attempt in range(MAX_REDRAWS + 1):
            H = composite_channel(rx_pos, tx_pos, radio, rng)
            if mode != "zf-exact" or np.linalg.cond(H) <= MAX_CONDITION:
                break
            redraws += 1
        else:
            raise SingularChannel(f"channel ill-conditioned after {MAX_REDRAWS} redraws")
        rates[f, active] = np.log2(1.0 + coop_sinr(H, radio, mode))
    return rates, redraws


# per-drop record columns
_FIELDS = (
    "valid", "mode1", "n_coop", "n_ncoop", "n_cell", "n_active",
    "throughput", "coop_se", "ncoop_se", "coop_user_rate", "ncoop_user_rate",
    "has_coop_users", "has_ncoop_users", "redraws",
)
_IDX = {name: i for i, name in enumerate(_FIELDS)}


@dataclass(frozen=True)
class SimSettings:
    eta: float = 0.5
    drops: int = 1000
    fading_draws: int = 10
    seed: int = 0
    coop_sinr_mode: str = "zf-exact"
    coop_min_clusters: int | None = None
    uniform_placement: bool = False
    workers: int | None = None


def _simulate_drop(index: int, layout, model, cfg, radio, s: SimSettings) -> np.ndarray:
    rng = stream_rng(s.seed, STREAM_DROPS, index)
    drop = generate_drop(layout, model, cfg, rng, s.uniform_placement, s.coop_min_clusters)
    n_coop, n_ncoop, n_cell = drop.counts()
    # scheduling and fading use their own stream so that runs differing only
    # in eta see identical drops
    srng = stream_rng(s.seed, STREAM_SLOTS, index)
    sched = schedule(drop, srng, s.eta, s.fading_draws)
    sinr_n = ncoop_sinr(drop, sched.ncoop_rx, sched.ncoop_tx, radio, srng)
    rn = np.log2(1.0 + sinr_n)
    out = np.zeros(len(_FIELDS))
    try:
        rc, redraws = _coop_rates(drop, sched, radio, srng, s.coop_sinr_mode)
    except SingularChannel as exc:
        log.warning("drop %d excluded: %s", index, exc)
        return out
    eta = s.eta if sched.coop_band else 0.0
    W = radio.bandwidth
    coop_sum = rc.sum(axis=1)
    ncoop_sum = rn.sum(axis=1)
    out[_IDX["valid"]] = 1
    out[_IDX["mode1"]] = drop.mode
    out[_IDX["n_coop"]] = n_coop
    out[_IDX["n_ncoop"]] = n_ncoop
    out[_IDX["n_cell"]] = n_cell
    if drop.hit_groups:
        out[_IDX["n_active"]] = np.mean([len(drop.participants[k]) for k in drop.hit_groups])
    out[_IDX["throughput"]] = W * np.mean(eta * coop_sum + (1 - eta) * ncoop_sum)
    n_coop_links = (sched.coop_rx >= 0).sum()
    n_ncoop_links = (sched.ncoop_rx >= 0).sum()
    out[_IDX["coop_se"]] = rc.sum() / n_coop_links if n_coop_links else np.nan
    out[_IDX["ncoop_se"]] = rn.sum() / n_ncoop_links if n_ncoop_links else np.nan
    if n_coop:
        out[_IDX["has_coop_users"]] = 1
        out[_IDX["coop_user_rate"]] = W * eta * coop_sum.mean() / n_coop
    ncoop_served = n_ncoop if sched.coop_band else n_ncoop + n_coop
    if ncoop_served:
        out[_IDX["has_ncoop_users"]] = 1
        out[_IDX["ncoop_user_rate"]] = W * (1 - eta) * ncoop_sum.mean() / ncoop_served
    out[_IDX["redraws"]] = redraws
    return out


def _worker_count(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("D2D_THREADS", "1") or 1)
    return max(1, workers)


def _map_drops(fn, n: int, workers: int) -> np.ndarray:
    if workers == 1 or n < 2:
        return np.array([fn(i) for i in range(n)])
    chunks = np.array_split(np.arange(n), min(workers, n))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda idx: [fn(int(i)) for i in idx], chunks))
    return np.array([row for part in parts for row in part])


def batch_means(values: np.ndarray, n_batches: int = MIN_BATCHES) -> tuple[float, float]:
    """Mean and 95% confidence half-width from contiguous batch means."""
    values = np.asarray(values, dtype=np.float64)
    n = len(values)
    if n == 0:
        return float("nan"), float("nan")
    nb = min(n_batches, n)
    if nb < 2:
        return float(values.mean()), float("inf")
    means = np.array([b.mean() for b in np.array_split(values, nb)])
    half = stats.t.ppf(0.975, nb - 1) * means.std(ddof=1) / np.sqrt(nb)
    return float(values.mean()), float(half)


@dataclass(frozen=True)
class SimReport:
    throughput: float
    throughput_ci: float
    coop_user_rate: float
    coop_user_rate_uncond: float
    ncoop_user_rate: float
    coop_prob: float
    n_active: float
    n_coop: float
    n_ncoop: float
    n_cell: float
    coop_se: float
    ncoop_se: float
    drops_used: int
    drops_excluded: int
    fading_redraws: int
    baseline_eta0: float | None = None
    baseline_tdma: float | None = None
    metadata: dict = field(default_factory=dict)


def _report(rows: np.ndarray, metadata: dict) -> SimReport:
    valid = rows[:, _IDX["valid"]] == 1
    r = rows[valid]
    col = lambda name: r[:, _IDX[name]]
    thr, ci = batch_means(col("throughput"))
    has_c = col("has_coop_users") == 1
    has_n = col("has_ncoop_users") == 1
    mean_or_nan = lambda v: float(np.nanmean(v)) if len(v) and not np.all(np.isnan(v)) else float("nan")
    return SimReport(
        throughput=thr,
        throughput_ci=ci,
        coop_user_rate=mean_or_nan(col("coop_user_rate")[has_c]),
        coop_user_rate_uncond=float(col("coop_user_rate").mean()) if len(r) else float("nan"),
        ncoop_user_rate=mean_or_nan(col("ncoop_user_rate")[has_n]),
        coop_prob=float(col("mode1").mean()),
        n_active=float(col("n_active").mean()),
        n_coop=float(col("n_coop").mean()),
        n_ncoop=float(col("n_ncoop").mean()),
        n_cell=float(col("n_cell").mean()),
        coop_se=mean_or_nan(col("coop_se")),
        ncoop_se=mean_or_nan(col("ncoop_se")),
        drops_used=int(valid.sum()),
        drops_excluded=int((~valid).sum()),
        fading_redraws=int(col("redraws").sum()),
        metadata=metadata,
    )


def run(cfg: ClusterConfig, model: PopularityModel, layout: ClusterLayout,
        radio: RadioConfig, settings: SimSettings) -> SimReport:
    """Simulate ``settings.drops`` drops and summarize them."""
    if settings.drops < 1:
        raise ValueError("drops must be >= 1")
    if not 0 <= settings.eta <= 1:
        raise ValueError("eta must lie in [0, 1]")
    cfg.check_against(model)
    workers = _worker_count(settings.workers)
    rows = _map_drops(lambda i: _simulate_drop(i, layout, model, cfg, radio, settings),
                      settings.drops, workers)
    meta = {"eta": settings.eta, "coop_sinr_mode": settings.coop_sinr_mode}
    if settings.coop_min_clusters is not None:
        meta["coop_min_clusters"] = settings.coop_min_clusters
        meta["partial_rule"] = "clusters outside the cooperating set are silent on the Coop band"
    return _report(rows, meta)


def run_partial_coop(cfg, model, layout, radio, settings: SimSettings,
                     coop_min_clusters: int) -> SimReport:
    """Cooperation among any ``coop_min_clusters`` or more clusters hitting a group."""
    if not 2 <= coop_min_clusters <= cfg.cluster_count:
        raise ValueError("coop_min_clusters must lie in 2..B")
    if coop_min_clusters == cfg.cluster_count:
        return run(cfg, model, layout, radio, replace(settings, coop_min_clusters=None))
    return run(cfg, model, layout, radio, replace(settings, coop_min_clusters=coop_min_clusters))


def reuse_colors(layout: ClusterLayout) -> np.ndarray:
    """2 x 2 reuse color (0..3) of each cell."""
    cc = layout.cell_coords()
    return (cc[:, 0] % 2) + 2 * (cc[:, 1] % 2)


def _tdma_drop(index: int, layout, model, cfg, radio, s: SimSettings) -> float:
    rng = stream_rng(s.seed, STREAM_DROPS, index)
    drop = generate_drop(layout, model, cfg, rng, s.uniform_placement)
    trng = stream_rng(s.seed, STREAM_TDMA, index)
    sched = schedule(drop, trng, eta=0.0, slots=s.fading_draws)
    colors = reuse_colors(layout)
    used = np.unique(colors)
    total = 0.0
    for c in used:
        rx = np.where(colors[None, :] == c, sched.ncoop_rx, -1)
        tx = np.where(colors[None, :] == c, sched.ncoop_tx, -1)
        rate = np.log2(1.0 + ncoop_sinr(drop, rx, tx, radio, trng))
        total += rate.sum(axis=1).mean()
    return radio.bandwidth * total / len(used)


def run_baseline_tdma(cfg: ClusterConfig, model: PopularityModel, layout: ClusterLayout,
                      radio: RadioConfig, settings: SimSettings) -> SimReport:
    """Reuse-4 baseline: one 2 x 2 color class of clusters per slot, one
    link per active cluster, no cooperation."""
    workers = _worker_count(settings.workers)
    vals = _map_drops(lambda i: _tdma_drop(i, layout, model, cfg, radio, settings),
                      settings.drops, workers)
    thr, ci = batch_means(vals)
    nan = float("nan")
    return SimReport(thr, ci, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan,
                     settings.drops, 0, 0, metadata={"baseline": "tdma-reuse4"})


def request_statistics(cfg: ClusterConfig, model: PopularityModel, draws: int,
                       rng: np.random.Generator, batch: int = 2000,
                       coop_min_clusters: int | None = None) -> dict[str, np.ndarray]:
    """Per-draw Mode-1 indicator and user-class counts from independent
    request draws, without geometry."""
    B, K = cfg.cluster_count, cfg.users_per_cluster
    threshold = B if coop_min_clusters is None else coop_min_clusters
    out = {k: [] for k in ("mode1", "n_coop", "n_ncoop", "n_cell")}
    for start in range(0, draws, batch):
        n = min(batch, draws - start)
        counts = rng.multinomial(K, model.group_probs, size=(n, B))
        cached = counts[:, :, :K]
        hit_by = (cached > 0).sum(axis=1)
        top = hit_by.max(axis=1, keepdims=True)
        hit = (hit_by == top) & (top >= threshold)
        n_coop = np.where(hit, cached.sum(axis=1), 0).sum(axis=1)
        n_cell = counts[:, :, K:].sum(axis=(1, 2))
        out["mode1"].append(hit.any(axis=1))
        out["n_coop"].append(n_coop)
        out["n_cell"].append(n_cell)
        out["n_ncoop"].append(cfg.total_users - n_coop - n_cell)
    return {k: np.concatenate(v) for k, v in out.items()}


def link_level_rates(layout: ClusterLayout, radio: RadioConfig, samples: int,
                     rng: np.random.Generator, batch: int = 2000) -> dict[str, np.ndarray]:
    """Per-sample cluster-averaged spectral efficiencies with every cluster
    running one link, positions uniform in each cell.

    Returns arrays ``ncoop`` (interference as noise), ``coop_approx`` and
    ``coop_zf`` of length ``samples``.
    """
    B = layout.cluster_count
    origins = layout.cell_origins()
    cell = np.array([layout.cell_width, layout.cell_height])
    res = {"ncoop": [], "coop_approx": [], "coop_zf": []}
    active_all = None
    for start in range(0, samples, batch):
        n = min(batch, samples - start)
        rx = origins + rng.random((n, B, 2)) * cell
        tx = origins + rng.random((n, B, 2)) * cell
        if active_all is None or active_all.shape[0] != n:
            active_all = np.ones((n, B), dtype=bool)
        sinr = _interference_sinr(rx, tx, active_all, radio, rng)
        res["ncoop"].append(np.log2(1 + sinr).mean(axis=1))
        d = np.linalg.norm(rx[:, :, None, :] - tx[:, None, :, :], axis=-1)
        h = (rng.standard_normal(d.shape) + 1j * rng.standard_normal(d.shape)) / np.sqrt(2.0)
        H = np.sqrt(radio.gain(d)) * h
        approx = radio.tx_power * np.sum(np.abs(H) ** 2, axis=2) / (B * radio.noise_power)
        res["coop_approx"].append(np.log2(1 + approx).mean(axis=1))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            inv = np.linalg.inv(H)
        gain = B * radio.tx_power / np.sum(np.abs(inv) ** 2, axis=(1, 2))
        res["coop_zf"].append(np.log2(1 + gain / radio.noise_power))
    return {k: np.concatenate(v) for k, v in res.items()}
