"""Analytic and Monte Carlo toolkit for cache-enabled D2D networks with
opportunistic cooperative transmission."""

from .config import ConfigError, SystemConfig, emit_config, parse_config, parse_text
from .geometry import ClusterLayout, build_layout
from .linkrates import RadioConfig, RateReport, dbm_to_watt
from .montecarlo import SimReport, SimSettings
from .optimizer import EtaResult, KRow, OptimizationResult, optimize
from .popularity import ClusterConfig, PopularityModel

__all__ = [
    "ClusterConfig", "ClusterLayout", "ConfigError", "EtaResult", "KRow",
    "OptimizationResult", "PopularityModel", "RadioConfig", "RateReport", "SimReport",
    "SimSettings", "SystemConfig", "build_layout", "dbm_to_watt", "emit_config", "optimize",
    "parse_config", "parse_text",
]
