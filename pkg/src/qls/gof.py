"""Goodness-of-fit validation built on the generalized quantile LS fit.

Two tests:

* In-sample: W = (n / sigma_hat^2) e' S^-1 e with e the quantile residuals
  at the estimation levels; approximately chi-square with k - 2 degrees of
  freedom under the null.
* Out-of-sample: the same quadratic form evaluated on a separate set of
  levels (default 0.01, 0.03, ..., 0.99), calibrated by a parametric
  bootstrap because its null distribution is intractable for mismatched
  grids.  When the out-levels equal the estimation levels the statistic
  reduces to W.

Both tests refuse fits other than a joint gQLS fit with positive scale.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy import special

from .errors import (
    BootstrapDegenerate,
    InsufficientDof,
    InvalidGrid,
    NonPositiveScale,
)
from .estimators import QlsFit
from .families import Family, ParamMode, Params
from .linalg import solve_spd, spd_factorize
from .quantiles import (
    QuantileGrid,
    QuantileResponse,
    _ranks,
    design_matrix,
    empirical_quantiles,
    levels_of,
    sigma_star,
)

__all__ = [
    "GofResult",
    "OutGrid",
    "ResidualDiagnostics",
    "bootstrap_pvalue",
    "chi2_sf",
    "default_out_grid",
    "make_out_grid",
    "q_decomposition",
    "residual_analysis",
    "w_out_statistic",
    "w_test",
]

DEFAULT_ALPHAS = (0.01, 0.05, 0.10)


@dataclass(frozen=True)
class OutGrid:
    """Validation levels, decoupled from the estimation grid."""

    levels: np.ndarray

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=float)
        if lv.ndim != 1 or lv.size == 0:
            raise InvalidGrid("out-levels must be a non-empty 1-D array")
        if np.any((lv <= 0.0) | (lv >= 1.0)):
            raise InvalidGrid("out-levels must be interior to (0, 1)")
        if np.any(np.diff(lv) <= 0.0):
            raise InvalidGrid("out-levels must be strictly increasing")
        lv.setflags(write=False)
        object.__setattr__(self, "levels", lv)

    @property
    def r(self) -> int:
        return self.levels.shape[0]


def default_out_grid() -> OutGrid:
    """Fifty levels 0.01 + 0.02 j, j = 0..49."""
    return OutGrid(levels=0.01 + 0.02 * np.arange(50))


def make_out_grid(levels=None) -> OutGrid:
    if levels is None:
        return default_out_grid()
    return OutGrid(levels=np.asarray(levels, dtype=float))


@dataclass(frozen=True)
class GofResult:
    statistic: float
    kind: str  # "in-sample" | "out-of-sample"
    p_value: float
    dof: int | None = None
    b_replicates: int | None = None
    failures: int = 0
    decision_at: dict = field(default_factory=dict)

    def reject(self, alpha: float = 0.05) -> bool:
        return self.p_value <= alpha


def chi2_sf(x: float, dof: int) -> float:
    """Chi-square survival function via the regularized incomplete gamma."""
    if x < 0:
        raise ValueError("statistic must be nonnegative")
    if dof < 1:
        raise ValueError("degrees of freedom must be >= 1")
    return float(special.gammaincc(dof / 2.0, x / 2.0))


def _require_gqls(fit: QlsFit, op: str) -> None:
    if fit.kind != "gqls":
        raise ValueError(f"{op} is defined for gQLS fits only, got {fit.kind!r}")
    if fit.mode is not ParamMode.LOCATION_SCALE:
        raise ValueError(f"{op} needs a joint location-scale fit")
    if not fit.sigma > 0:
        raise NonPositiveScale(f"{op} requires a positive scale estimate")


def _values_n(y, n):
    if isinstance(y, QuantileResponse):
        return np.asarray(y.values, dtype=float), y.n
    if n is None:
        raise ValueError("n is required when the response is a bare array")
    return np.asarray(y, dtype=float).ravel(), int(n)


def _quad_form(resid: np.ndarray, lower: np.ndarray) -> float:
    half = scipy.linalg.solve_triangular(lower, resid, lower=True)
    return float(half @ half)


@dataclass(frozen=True)
class ResidualDiagnostics:
    residuals: np.ndarray
    residual_cov: np.ndarray
    fitted: np.ndarray
    fitted_cov: np.ndarray


def residual_analysis(y, x, fit: QlsFit, sigma_star_mat: np.ndarray,
                      n: int | None = None) -> ResidualDiagnostics:
    """Quantile residuals and their plug-in covariances.

    residual covariance: (sigma_hat^2/n) (S - X (X'S^-1 X)^-1 X')
    fitted covariance:   (sigma_hat^2/n)  X (X'S^-1 X)^-1 X'
    The fitted values and residuals are asymptotically independent; exporting
    the pairs supports a predicted-versus-residual diagnostic plot.
    """
    _require_gqls(fit, "residual analysis")
    yv, n_obs = _values_n(y, n)
    x = np.asarray(x, dtype=float)
    s = np.asarray(sigma_star_mat, dtype=float)
    beta = np.array([fit.mu, fit.sigma])
    fitted = x @ beta
    resid = yv - fitted
    ls = spd_factorize(s)
    a = solve_spd(ls, x)               # S^-1 X
    g = spd_factorize(x.T @ a)
    core = x @ solve_spd(g, x.T)       # X (X'S^-1X)^-1 X'
    scale2 = fit.sigma ** 2 / n_obs
    return ResidualDiagnostics(
        residuals=resid,
        residual_cov=scale2 * (s - core),
        fitted=fitted,
        fitted_cov=scale2 * core,
    )


def q_decomposition(y, x, sigma_star_mat: np.ndarray, beta_true: Params,
                    fit: QlsFit, n: int | None = None) -> tuple[float, float, float]:
    """Orthogonal split of the full quadratic form at the true parameters.

    Q  = (n/sigma^2) (Y - X b)' S^-1 (Y - X b)           (b = true beta)
    Q1 = same form at the fitted parameters
    Q2 = (n/sigma^2) (bhat - b)' X'S^-1X (bhat - b)
    and Q = Q1 + Q2 by the gQLS normal equations.
    """
    _require_gqls(fit, "quadratic-form decomposition")
    yv, n_obs = _values_n(y, n)
    x = np.asarray(x, dtype=float)
    if not beta_true.sigma > 0:
        raise NonPositiveScale("true sigma must be positive")
    ls = spd_factorize(np.asarray(sigma_star_mat, dtype=float))
    beta_hat = np.array([fit.mu, fit.sigma])
    beta0 = np.array([beta_true.mu, beta_true.sigma])
    c = n_obs / beta_true.sigma ** 2
    q = c * _quad_form(yv - x @ beta0, ls.lower)
    q1 = c * _quad_form(yv - x @ beta_hat, ls.lower)
    xw = scipy.linalg.solve_triangular(ls.lower, x, lower=True)
    diff = beta_hat - beta0
    q2 = c * float(diff @ (xw.T @ xw) @ diff)
    return q, q1, q2


def w_test(y, x, sigma_star_mat: np.ndarray, fit: QlsFit, n: int | None = None,
           alphas=DEFAULT_ALPHAS) -> GofResult:
    """In-sample test: W = (n/sigma_hat^2) e' S^-1 e, chi-square k-2 dof."""
    _require_gqls(fit, "the in-sample test")
    yv, n_obs = _values_n(y, n)
    x = np.asarray(x, dtype=float)
    k = yv.shape[0]
    if k < 3:
        raise InsufficientDof("need k >= 3 levels for a k-2 dof statistic")
    ls = spd_factorize(np.asarray(sigma_star_mat, dtype=float))
    resid = yv - x @ np.array([fit.mu, fit.sigma])
    stat = n_obs / fit.sigma ** 2 * _quad_form(resid, ls.lower)
    dof = k - 2
    p = chi2_sf(stat, dof)
    return GofResult(statistic=stat, kind="in-sample", p_value=p, dof=dof,
                     decision_at={a: p <= a for a in alphas})


def w_out_statistic(data, fit: QlsFit, fam: Family, out_grid: OutGrid,
                    n: int | None = None) -> float:
    """Out-of-sample quadratic form at the validation levels."""
    _require_gqls(fit, "the out-of-sample statistic")
    data = np.asarray(data, dtype=float).ravel()
    n_obs = data.shape[0] if n is None else int(n)
    y_out = empirical_quantiles(data, out_grid).values
    x_out = design_matrix(fam, out_grid, ParamMode.LOCATION_SCALE)
    s_out = sigma_star(fam, out_grid)
    ls = spd_factorize(s_out)
    resid = y_out - x_out @ np.array([fit.mu, fit.sigma])
    return n_obs / fit.sigma ** 2 * _quad_form(resid, ls.lower)


def bootstrap_pvalue(data, fam: Family, grid: QuantileGrid,
                     out_grid: OutGrid | None = None, B: int = 1000,
                     seed: int = 0, alphas=DEFAULT_ALPHAS,
                     max_failure_fraction: float = 0.10) -> GofResult:
    """Parametric-bootstrap p-value for the out-of-sample statistic.

    1. Fit gQLS on the data; record the observed statistic.
    2. Draw a sample of the same size from the fitted model, refit gQLS on
       the estimation levels, and recompute the statistic.
    3. Repeat B times.
    4. p-hat = fraction of replicate statistics strictly exceeding the
       observed one (ties count as non-exceedances); reject when
       p-hat <= alpha.

    Replicate b draws from a generator seeded with seed XOR b, so runs are
    reproducible and replicates are independent.  Replicates whose refit
    fails (e.g. non-positive scale) are dropped and the replicate count
    adjusted; more than ``max_failure_fraction`` failures aborts.
    """
    if B < 1:
        raise ValueError("need at least one bootstrap replicate")
    if out_grid is None:
        out_grid = default_out_grid()
    data = np.asarray(data, dtype=float).ravel()
    n = data.shape[0]

    x = design_matrix(fam, grid, ParamMode.LOCATION_SCALE)
    s = sigma_star(fam, grid)
    ls = spd_factorize(s)
    xw = scipy.linalg.solve_triangular(ls.lower, x, lower=True)
    g = spd_factorize(xw.T @ xw)
    # beta = weights @ Y for fast refits inside the loop
    weights = solve_spd(g, solve_spd(ls, x).T)

    x_out = design_matrix(fam, out_grid, ParamMode.LOCATION_SCALE)
    ls_out = spd_factorize(sigma_star(fam, out_grid))
    # one sort per replicate serves both level sets
    idx_fit = _ranks(n, levels_of(grid))[0] - 1
    idx_out = _ranks(n, levels_of(out_grid))[0] - 1

    def refit_and_stat(sample: np.ndarray) -> tuple[float, np.ndarray] | None:
        srt = np.sort(sample)
        beta = weights @ srt[idx_fit]
        if not beta[1] > 0:
            return None
        resid = srt[idx_out] - x_out @ beta
        return n / beta[1] ** 2 * _quad_form(resid, ls_out.lower), beta

    first = refit_and_stat(data)
    if first is None:
        raise NonPositiveScale("gQLS fit on the data has non-positive scale")
    observed, beta0 = first
    fitted = Params(mu=float(beta0[0]), sigma=float(beta0[1]))

    exceed = 0
    failures = 0
    for b in range(1, B + 1):
        rng = np.random.default_rng(seed ^ b)
        sample = fam.sample(fitted, n, rng)
        result = refit_and_stat(sample)
        if result is None:
            failures += 1
            continue
        if result[0] > observed:
            exceed += 1
    b_eff = B - failures
    if failures > max_failure_fraction * B or b_eff == 0:
        raise BootstrapDegenerate(
            f"{failures} of {B} bootstrap replicates failed to fit"
        )
    p = exceed / b_eff
    return GofResult(statistic=observed, kind="out-of-sample", p_value=p,
                     b_replicates=b_eff, failures=failures,
                     decision_at={a: p <= a for a in alphas})
