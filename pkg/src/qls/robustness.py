"""Breakdown points and influence functions of the quantile LS estimators.

The influence function of a single sample quantile at level p is

    IF(x) = sigma * (p - 1{x <= mu + sigma Q0(p)}) / f0(Q0(p)),

a bounded step function; the estimator influence functions are the
corresponding weight-matrix combinations of the k quantile influences, so
they are piecewise constant with jumps only at the population quantiles of
the grid levels.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDensity
from .estimators import qls_weights
from .families import Family, ParamMode, Params
from .quantiles import QuantileGrid, design_matrix, levels_of, sigma_star

__all__ = [
    "BreakdownPoint",
    "InfluenceCurve",
    "breakdown_point",
    "if_quantile",
    "if_estimator",
    "influence_curve",
]


@dataclass(frozen=True)
class BreakdownPoint:
    lower: float
    upper: float
    value: float


def breakdown_point(grid: QuantileGrid) -> BreakdownPoint:
    """Asymptotic breakdown of a fit on this grid: contamination beyond the
    grid bounds cannot move any selected order statistic, so the lower/upper
    breakdown points are a and 1-b."""
    lbp = float(grid.a)
    ubp = float(1.0 - grid.b)
    return BreakdownPoint(lower=lbp, upper=ubp, value=min(lbp, ubp))


def _density_at_levels(fam: Family, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q = np.atleast_1d(np.asarray(fam.qf(p), dtype=float))
    f = np.atleast_1d(np.asarray(fam.pdf(q), dtype=float))
    if np.any(~np.isfinite(f)) or np.any(f <= 0.0):
        raise DegenerateDensity(f"{fam.name}: density non-positive at a quantile")
    return q, f


def if_quantile(x, p: float, fam: Family, params: Params):
    """Influence of a point mass at x on the sample quantile at level p.

    Right-continuous in x with a single downward jump of size
    sigma / f0(Q0(p)) at the population quantile (the indicator is
    inclusive: 1{x <= quantile}).
    """
    q, f = _density_at_levels(fam, np.asarray([p], dtype=float))
    jump = params.mu + params.sigma * q[0]
    xv = np.asarray(x, dtype=float)
    ind = (xv <= jump).astype(float)
    out = params.sigma * (p - ind) / f[0]
    return float(out) if xv.ndim == 0 else out


def if_estimator(x, kind: str, fam: Family, params: Params, grid: QuantileGrid):
    """Influence of a point mass at x on (mu_hat, sigma_hat).

    Returns a pair of floats for scalar x, else a pair of arrays.
    """
    p = levels_of(grid)
    q, f = _density_at_levels(fam, p)
    xdes = design_matrix(fam, grid, ParamMode.LOCATION_SCALE)
    s = sigma_star(fam, grid) if kind == "gqls" else None
    w = qls_weights(kind, xdes, s)  # 2 x k
    jumps = params.mu + params.sigma * q
    xv = np.asarray(x, dtype=float)
    scalar = xv.ndim == 0
    xv = np.atleast_1d(xv)
    ind = (xv[None, :] <= jumps[:, None]).astype(float)
    ifq = params.sigma * (p[:, None] - ind) / f[:, None]
    out = w @ ifq
    if scalar:
        return float(out[0, 0]), float(out[1, 0])
    return out[0], out[1]


@dataclass(frozen=True)
class InfluenceCurve:
    """Sampled influence curves for both parameters, with paired samples
    straddling every jump so the step geometry survives plotting."""

    x: np.ndarray
    if_mu: np.ndarray
    if_sigma: np.ndarray
    kind: str
    family: str
    grid: QuantileGrid
    jumps: np.ndarray = field(repr=False, default=None)


def influence_curve(kind: str, fam: Family, params: Params, grid: QuantileGrid,
                    x_range: tuple[float, float], points: int = 201) -> InfluenceCurve:
    lo, hi = float(x_range[0]), float(x_range[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError("x_range must be a finite increasing pair")
    p = levels_of(grid)
    q, _ = _density_at_levels(fam, p)
    jumps = params.mu + params.sigma * q
    eps = 1e-9 * params.sigma
    xs = np.concatenate([
        np.linspace(lo, hi, int(points)),
        jumps - eps,
        jumps + eps,
    ])
    xs = np.unique(xs)
    if_mu, if_sigma = if_estimator(xs, kind, fam, params, grid)
    return InfluenceCurve(x=xs, if_mu=if_mu, if_sigma=if_sigma, kind=kind,
                          family=fam.name, grid=grid, jumps=jumps)
