"""Scenario configuration: a flat ``key = value`` text format.

Lines hold one assignment each; ``#`` starts a comment. Unknown keys,
malformed lines and violated constraints are reported with the offending
line number. Keys with defaults may be omitted; the defaults used are
recorded in :attr:`SystemConfig.defaults_applied`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .geometry import ClusterLayout, build_layout
from .linkrates import RadioConfig, dbm_to_watt
from .popularity import ClusterConfig, PopularityModel

PATHLOSS_MODELS = ("powerlaw", "logdistance")
COOP_SINR_MODES = ("zf-exact", "paper-approx")

# log-distance model 37.6 + 36.8 log10(d) dB, written as c * d**-alpha
LOGDISTANCE_INTERCEPT_DB = 37.6
LOGDISTANCE_EXPONENT = 3.68


class ConfigError(ValueError):
    """Invalid configuration file or value."""


@dataclass(frozen=True)
class SystemConfig:
    num_users: int
    catalog_size: int
    cache_size: int
    zipf_beta: float
    side_length_m: float = 100.0
    users_per_cluster: int | None = None
    bandwidth_hz: float = 20e6
    tx_power_dbm: float = 23.0
    noise_dbm: float = -100.0
    pathloss: str = "logdistance"
    alpha: float = LOGDISTANCE_EXPONENT
    min_distance_m: float = 1.0
    rate_floor_bps: float = 1e6
    eta: float | None = None
    drops: int = 1000
    fading_draws: int = 10
    seed: int = 0
    coop_min_clusters: int | None = None
    coop_sinr_mode: str = "zf-exact"
    defaults_applied: tuple[str, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """Raise :class:`ConfigError` naming the first violated invariant."""
        try:
            model = self.popularity()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        checks = [
            (self.num_users >= 1, "num_users must be >= 1"),
            (self.side_length_m > 0, "side_length_m must be positive"),
            (self.bandwidth_hz > 0, "bandwidth_hz must be positive"),
            (math.isfinite(self.tx_power_dbm), "tx_power_dbm must be finite"),
            (math.isfinite(self.noise_dbm), "noise_dbm must be finite"),
            (self.pathloss in PATHLOSS_MODELS, f"pathloss must be one of {PATHLOSS_MODELS}"),
            (self.alpha >= 2, "alpha must be >= 2"),
            (self.min_distance_m > 0, "min_distance_m must be positive"),
            (self.rate_floor_bps >= 0, "rate_floor_bps must be >= 0"),
            (self.drops >= 1, "drops must be >= 1"),
            (self.fading_draws >= 1, "fading_draws must be >= 1"),
            (self.seed >= 0, "seed must be >= 0"),
            (self.coop_sinr_mode in COOP_SINR_MODES,
             f"coop_sinr_mode must be one of {COOP_SINR_MODES}"),
            (self.eta is None or 0 <= self.eta <= 1, "eta must lie in [0, 1]"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        if self.pathloss == "logdistance" and self.alpha != LOGDISTANCE_EXPONENT:
            raise ConfigError(
                f"logdistance path loss fixes alpha = {LOGDISTANCE_EXPONENT}; "
                "use pathloss = powerlaw for other exponents"
            )
        K = self.users_per_cluster
        if K is not None:
            if K < 1 or self.num_users % K:
                raise ConfigError(
                    f"users_per_cluster {K} must divide num_users {self.num_users}"
                )
            if K > model.group_count:
                raise ConfigError(
                    f"users_per_cluster {K} exceeds the group count {model.group_count}"
                )
            B = self.num_users // K
            if self.min_distance_m >= self.side_length_m / math.sqrt(B):
                raise ConfigError("min_distance_m must be smaller than the cluster side")
            if self.coop_min_clusters is not None and not 2 <= self.coop_min_clusters <= B:
                raise ConfigError(f"coop_min_clusters must lie in 2..{B}")
        elif self.coop_min_clusters is not None and self.coop_min_clusters < 2:
            raise ConfigError("coop_min_clusters must be >= 2")

    # derived objects -----------------------------------------------------

    def popularity(self) -> PopularityModel:
        return PopularityModel(self.catalog_size, self.cache_size, self.zipf_beta)

    def clusters(self, K: int | None = None) -> ClusterConfig:
        K = self.users_per_cluster if K is None else K
        if K is None:
            raise ConfigError("users_per_cluster is not set")
        return ClusterConfig(self.num_users, K)

    def layout(self, K: int | None = None) -> ClusterLayout:
        return build_layout(self.side_length_m, self.clusters(K).cluster_count)

    def gain_constant(self) -> float:
        if self.pathloss == "logdistance":
            return 10.0 ** (-LOGDISTANCE_INTERCEPT_DB / 10.0)
        return 1.0

    def radio(self, K: int | None = None) -> RadioConfig:
        B = self.clusters(K).cluster_count
        return RadioConfig(
            tx_power=dbm_to_watt(self.tx_power_dbm),
            noise_power=dbm_to_watt(self.noise_dbm),
            bandwidth=self.bandwidth_hz,
            pathloss_exponent=self.alpha,
            cell_side=self.side_length_m / math.sqrt(B),
            cluster_count=B,
            min_distance=self.min_distance_m,
            gain_constant=self.gain_constant(),
        )

    def with_value(self, key: str, text: str) -> "SystemConfig":
        """Copy with one key replaced by its parsed text value."""
        if key not in _TYPES:
            raise ConfigError(f"unknown key {key!r}")
        return replace(self, **{key: _convert(key, text)})


def _optional(kind):
    return ("optional", kind)


_TYPES = {
    "side_length_m": float, "num_users": int, "users_per_cluster": _optional(int),
    "bandwidth_hz": float, "tx_power_dbm": float, "noise_dbm": float, "pathloss": str,
    "alpha": float, "min_distance_m": float, "catalog_size": int, "cache_size": int,
    "zipf_beta": float, "rate_floor_bps": float, "eta": _optional(float), "drops": int,
    "fading_draws": int, "seed": int, "coop_min_clusters": _optional(int),
    "coop_sinr_mode": str,
}
REQUIRED_KEYS = ("num_users", "catalog_size", "cache_size", "zipf_beta")
KEY_ORDER = tuple(f.name for f in fields(SystemConfig) if f.name != "defaults_applied")


def _convert(key: str, text: str):
    kind = _TYPES[key]
    if isinstance(kind, tuple):
        if text.lower() in ("", "none"):
            return None
        kind = kind[1]
    if kind is int:
        try:
            value = float(text)
        except ValueError:
            raise ConfigError(f"{key} expects an integer, got {text!r}") from None
        if not value.is_integer():
            raise ConfigError(f"{key} expects an integer, got {text!r}")
        return int(value)
    if kind is float:
        try:
            value = float(text)
        except ValueError:
            raise ConfigError(f"{key} expects a number, got {text!r}") from None
        if math.isnan(value):
            raise ConfigError(f"{key} must not be nan")
        return value
    return text


def parse_text(text: str, source: str = "<config>") -> SystemConfig:
    values: dict = {}
    lines: dict[str, int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"{source}:{number}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{number}: duplicate key {key!r}")
        try:
            values[key] = _convert(key, value)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{number}: {exc}") from None
        lines[key] = number

    defaults = {f.name: f.default for f in fields(SystemConfig)
                if f.name in _TYPES and f.name not in REQUIRED_KEYS}
    applied = tuple(k for k in KEY_ORDER if k in defaults and k not in values)
    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        listed = ", ".join(f"{k}={defaults[k]}" for k in applied)
        raise ConfigError(
            f"{source}: missing required keys {', '.join(missing)}"
            f" (defaults applied to the other absent keys: {listed or 'none'})"
        )
    try:
        return SystemConfig(**values, defaults_applied=applied)
    except ConfigError as exc:
        where = _blame(str(exc), lines)
        raise ConfigError(f"{source}{where}: {exc}") from None


def _blame(message: str, lines: dict[str, int]) -> str:
    """Line of the first key named in ``message``, if any."""
    hits = [(message.find(k), n) for k, n in lines.items() if k in message]
    return f":{min(hits)[1]}" if hits else ""


def parse_config(path) -> SystemConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_text(text, str(path))


def emit_config(cfg: SystemConfig) -> str:
    """Text that parses back to an equal config; unset optional keys are omitted."""
    out = []
    for key in KEY_ORDER:
        value = getattr(cfg, key)
        if value is None:
            continue
        out.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return "\n".join(out) + "\n"
