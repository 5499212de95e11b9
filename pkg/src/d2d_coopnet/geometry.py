"""Cluster grid, link-distance densities and path-loss moment integrals.

Distances in the density functions are normalized by the cluster side, so
the signal-link density lives on [0, sqrt(2)] (two points in one unit
square) and the interference-link density on [0, sqrt(5)] (one point in each
of two horizontally adjacent unit squares).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
import warnings

import numpy as np
from scipy import integrate

SQRT2 = math.sqrt(2.0)
SQRT5 = math.sqrt(5.0)
DEFAULT_NEIGHBORS = 8


@dataclass(frozen=True)
class ClusterLayout:
    hotspot_side: float
    grid_x: int
    grid_y: int

    @property
    def cluster_count(self) -> int:
        return self.grid_x * self.grid_y

    @property
    def cell_width(self) -> float:
        return self.hotspot_side / self.grid_x

    @property
    def cell_height(self) -> float:
        return self.hotspot_side / self.grid_y

    @property
    def analytic_cell_side(self) -> float:
        return self.hotspot_side / math.sqrt(self.cluster_count)

    @property
    def is_square(self) -> bool:
        return self.grid_x == self.grid_y

    def cell_origins(self) -> np.ndarray:
        """Lower-left corners of the cells, shape (B, 2), row-major in x."""
        ix = np.arange(self.cluster_count) % self.grid_x
        iy = np.arange(self.cluster_count) // self.grid_x
        return np.stack([ix * self.cell_width, iy * self.cell_height], axis=1)

    def cell_coords(self) -> np.ndarray:
        """Integer (column, row) of each cell, shape (B, 2)."""
        idx = np.arange(self.cluster_count)
        return np.stack([idx % self.grid_x, idx // self.grid_x], axis=1)


def build_layout(hotspot_side: float, cluster_count: int) -> ClusterLayout:
    """Split a square hotspot into ``cluster_count`` cells.

    Perfect squares give a square grid. Otherwise the grid is
    ``grid_x x grid_y`` with ``grid_x`` the largest divisor not above
    sqrt(B), and cells are rectangles.
    """
    if cluster_count < 1:
        raise ValueError("cluster_count must be >= 1")
    if not hotspot_side > 0:
        raise ValueError("hotspot_side must be positive")
    gx = math.isqrt(cluster_count)
    while cluster_count % gx:
        gx -= 1
    return ClusterLayout(float(hotspot_side), gx, cluster_count // gx)


def intra_pdf(r):
    """Density of the distance between two uniform points in a unit square."""
    r = np.asarray(r, dtype=np.float64)
    out = np.zeros_like(r)
    a = (r >= 0) & (r < 1)
    ra = r[a]
    out[a] = 2 * ra * (ra**2 - 4 * ra + np.pi)
    b = (r >= 1) & (r < SQRT2)
    rb = r[b]
    eps = np.sqrt(rb**2 - 1)
    out[b] = (
        8 * rb * eps
        - 2 * rb * (rb**2 + 2)
        + 4 * rb * (np.arcsin(1 / rb) - np.arccos(1 / rb))
    )
    return np.maximum(out, 0.0) if out.ndim else max(float(out), 0.0)


def inter_pdf(r):
    """Density of the distance between uniform points in two adjacent unit squares.

    Obtained as r * integral over the quarter circle of the product of the
    axis-difference densities, |dx| triangular on [0, 2] and |dy| with
    density 2(1 - v) on [0, 1]. On [1, sqrt(2)) the linear term is 3r and on
    [2, sqrt(5)) the arcsin(1/r) term carries the coefficient +4r; the
    commonly quoted forms with 2r and -1 there are neither continuous nor
    normalized.
    """
    r = np.asarray(r, dtype=np.float64)
    out = np.zeros_like(r)
    a = (r >= 0) & (r < 1)
    ra = r[a]
    out[a] = 2 * ra**2 - ra**3
    b = (r >= 1) & (r < SQRT2)
    rb = r[b]
    eps = np.sqrt(rb**2 - 1)
    out[b] = (
        3 * rb - 4 * rb**2 + 2 * rb**3 - 4 * rb * eps + 4 * rb * np.arcsin(eps / rb)
    )
    c = (r >= SQRT2) & (r < 2)
    rc = r[c]
    eps = np.sqrt(rc**2 - 1)
    out[c] = 4 * rc * eps + 4 * rc * np.arcsin(1 / rc) - rc - 4 * rc**2
    d = (r >= 2) & (r < SQRT5)
    rd = r[d]
    eps = np.sqrt(rd**2 - 1)
    xi = np.sqrt(rd**2 - 4)
    out[d] = (
        -5 * rd
        - rd**3
        + 4 * rd * eps
        - 4 * rd * np.arcsin(xi / rd)
        + 4 * rd * np.arcsin(1 / rd)
        + 2 * rd * xi
    )
    return np.maximum(out, 0.0) if out.ndim else max(float(out), 0.0)


def sample_intra(rng: np.random.Generator, size=None):
    p = rng.random((2, 2) if size is None else (size, 2, 2))
    d = p[..., 0, :] - p[..., 1, :]
    return np.hypot(d[..., 0], d[..., 1])


def sample_inter(rng: np.random.Generator, size=None):
    p = rng.random((2, 2) if size is None else (size, 2, 2))
    dx = p[..., 0, 0] - (p[..., 1, 0] + 1.0)
    dy = p[..., 0, 1] - p[..., 1, 1]
    return np.hypot(dx, dy)


_INTRA_BREAKS = (1.0, SQRT2)
_INTER_BREAKS = (1.0, SQRT2, 2.0, SQRT5)


def _moment(pdf, breaks, alpha: float, r_min: float) -> float:
    edges = [r_min] + [b for b in breaks if b > r_min]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(
            lambda t: t ** (-alpha) * float(pdf(t)), lo, hi, epsabs=1e-9, epsrel=1e-11,
            limit=200,
        )
        total += val
    return total


def _check_moment_args(alpha: float, r_min: float) -> None:
    if not 0 < r_min < 1:
        raise ValueError("r_min must lie in (0, 1); the moments diverge at r_min = 0")
    if alpha < 2:
        warnings.warn(f"path-loss exponent {alpha} < 2 is outside the modeled range")


@lru_cache(maxsize=256)
def _signal_moment(alpha: float, r_min: float) -> float:
    return _moment(intra_pdf, _INTRA_BREAKS, alpha, r_min)


@lru_cache(maxsize=256)
def _interference_moment(alpha: float, r_min: float) -> float:
    return _moment(inter_pdf, _INTER_BREAKS, alpha, r_min)


def q2(alpha: float, r_min: float) -> float:
    """E[r^-alpha; r >= r_min] for the adjacent-cluster distance."""
    _check_moment_args(alpha, r_min)
    return _interference_moment(float(alpha), float(r_min))


def q1(alpha: float, r_min: float, neighbors: int = DEFAULT_NEIGHBORS) -> float:
    """Signal moment plus ``neighbors`` copies of the interference moment."""
    _check_moment_args(alpha, r_min)
    return _signal_moment(float(alpha), float(r_min)) + neighbors * q2(alpha, r_min)


_CDF_POINTS = 200_001


@lru_cache(maxsize=2)
def _cdf_table(which: str) -> tuple[np.ndarray, np.ndarray]:
    pdf, top = (intra_pdf, SQRT2) if which == "intra" else (inter_pdf, SQRT5)
    grid = np.linspace(0.0, top, _CDF_POINTS)
    cdf = integrate.cumulative_trapezoid(pdf(grid), grid, initial=0.0)
    return grid, cdf / cdf[-1]


def intra_cdf(r):
    """Distribution function of :func:`intra_pdf`, tabulated and interpolated."""
    grid, cdf = _cdf_table("intra")
    return np.interp(r, grid, cdf, left=0.0, right=1.0)


def inter_cdf(r):
    """Distribution function of :func:`inter_pdf`, tabulated and interpolated."""
    grid, cdf = _cdf_table("inter")
    return np.interp(r, grid, cdf, left=0.0, right=1.0)
