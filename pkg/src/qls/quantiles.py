"""Quantile grids, empirical quantiles, and the standardized regression pieces.

The grid places k levels equally spaced on [a, b]; the empirical quantile at
level p is the ceil(n*p)-th order statistic.  From a family's standard forms
we assemble the standardized covariance of sample quantiles

    s_ij = p_i (1 - p_j) / (f0(Q0(p_i)) f0(Q0(p_j)))   for i <= j,

and the regression design whose columns are 1 and Q0(p_i).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    WARN_DEGENERATE_GRID,
    WARN_RANK_CLAMPED,
    DegenerateDensity,
    EmptySample,
    InvalidGrid,
)
from .families import Family, ParamMode

__all__ = [
    "QuantileGrid",
    "QuantileResponse",
    "make_grid",
    "empirical_quantiles",
    "sigma_star",
    "design_matrix",
]

# beyond this size, pull the needed order statistics by selection instead of
# sorting the whole sample; keeping one algorithm across the 1e6..1e9 range
# also keeps the cost curve homogeneous there
_SORT_CUTOFF = 100_000


@dataclass(frozen=True)
class QuantileGrid:
    """k probability levels, equally spaced from a to b (inclusive)."""

    a: float
    b: float
    k: int
    levels: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.levels.setflags(write=False)


def make_grid(a: float, b: float, k: int) -> QuantileGrid:
    """Build the level grid p_i = a + (i-1)(b-a)/(k-1), i = 1..k."""
    if not (0.0 < a < b < 1.0):
        raise InvalidGrid(f"need 0 < a < b < 1, got a={a}, b={b}")
    if int(k) != k or k < 2:
        raise InvalidGrid(f"need integer k >= 2, got k={k}")
    return QuantileGrid(a=float(a), b=float(b), k=int(k), levels=np.linspace(a, b, int(k)))


def levels_of(grid) -> np.ndarray:
    """Accept a QuantileGrid, an OutGrid-like object, or a raw level array."""
    levels = np.asarray(getattr(grid, "levels", grid), dtype=float)
    if levels.ndim != 1 or levels.size == 0:
        raise InvalidGrid("levels must be a non-empty 1-D array")
    return levels


@dataclass(frozen=True)
class QuantileResponse:
    """Empirical quantiles at the grid levels (nondecreasing) plus source n."""

    values: np.ndarray
    n: int
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if np.any(np.diff(vals) < 0):
            raise ValueError("quantile response must be nondecreasing")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def k(self) -> int:
        return self.values.shape[0]


def _ranks(n: int, levels: np.ndarray) -> tuple[np.ndarray, list[str]]:
    """1-based order-statistic ranks ceil(n * p), robust to float fuzz."""
    t = n * levels
    nearest = np.rint(t)
    snap = np.abs(t - nearest) <= 1e-9 * np.maximum(1.0, np.abs(t))
    ranks = np.where(snap, nearest, np.ceil(t)).astype(np.int64)
    warns: list[str] = []
    if ranks[0] < 1:
        ranks = np.maximum(ranks, 1)
        warns.append(WARN_RANK_CLAMPED)
    elif n * levels[0] < 1.0 - 1e-12:
        warns.append(WARN_RANK_CLAMPED)
    if np.any(np.diff(ranks) == 0):
        warns.append(WARN_DEGENERATE_GRID)
    return ranks, warns


def empirical_quantiles(sample, grid) -> QuantileResponse:
    """Extract the ceil(n*p)-th order statistics at each grid level.

    Large samples are handled by multi-rank selection (introselect) rather
    than a full sort.
    """
    data = np.asarray(sample, dtype=float)
    if data.ndim != 1:
        data = data.ravel()
    n = data.shape[0]
    if n == 0:
        raise EmptySample("cannot take quantiles of an empty sample")
    levels = levels_of(grid)
    ranks, warns = _ranks(n, levels)
    idx = ranks - 1
    if n > _SORT_CUTOFF:
        kth = np.unique(idx)
        part = np.partition(data, kth)
        values = part[idx]
    else:
        values = np.sort(data)[idx]
    return QuantileResponse(values=values, n=n, warnings=tuple(warns))


def sigma_star(fam: Family, grid) -> np.ndarray:
    """Standardized covariance matrix of the sample quantiles at the grid.

    Symmetric and positive definite whenever the levels are distinct and the
    standard density is positive at each grid quantile.
    """
    p = levels_of(grid)
    if np.any((p <= 0.0) | (p >= 1.0)):
        raise InvalidGrid("all levels must be interior to (0, 1)")
    q = fam.qf(p)
    f = np.atleast_1d(np.asarray(fam.pdf(q), dtype=float))
    if np.any(~np.isfinite(f)) or np.any(f <= 0.0):
        raise DegenerateDensity(
            f"{fam.name}: standard density non-positive at a grid quantile"
        )
    pmin = np.minimum.outer(p, p)
    pmax = np.maximum.outer(p, p)
    return pmin * (1.0 - pmax) / np.outer(f, f)


def design_matrix(fam: Family, grid, mode: ParamMode = ParamMode.LOCATION_SCALE) -> np.ndarray:
    """Regression design: k x 2 [1, Q0(p)] jointly, or the single relevant
    column when one parameter is known."""
    p = levels_of(grid)
    q = np.atleast_1d(np.asarray(fam.qf(p), dtype=float))
    ones = np.ones_like(q)
    if mode is ParamMode.LOCATION_SCALE:
        return np.column_stack([ones, q])
    if mode is ParamMode.LOCATION_ONLY:
        return ones[:, None].copy()
    return q[:, None].copy()
