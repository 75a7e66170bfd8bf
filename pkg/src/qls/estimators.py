"""Ordinary and generalized quantile least squares fits, plus MLE baselines.

With Y the vector of sample quantiles and X = [1, Q0(p)] the standardized
design, the two regression estimators are

    oQLS:  beta = (X'X)^-1 X'Y
    gQLS:  beta = (X' S^-1 X)^-1 X' S^-1 Y        (S the standardized
                                                   quantile covariance)

with per-observation asymptotic covariances

    oQLS:  (sigma^2/n) (X'X)^-1 X' S X (X'X)^-1
    gQLS:  (sigma^2/n) (X' S^-1 X)^-1

where sigma^2 is plugged in as the squared scale estimate.  The gQLS path is
solved through Cholesky factors; S is never inverted explicitly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg
import scipy.optimize
from scipy import special

from .errors import (
    WARN_NON_POSITIVE_SCALE,
    DomainError,
    EmptySample,
    NoConvergence,
    NotPositiveDefinite,
    RankDeficient,
    Unavailable,
)
from .families import Family, ParamMode, Params
from .linalg import SpdFactor, solve_spd, spd_factorize
from .quantiles import QuantileGrid, QuantileResponse, design_matrix, empirical_quantiles, make_grid, sigma_star

__all__ = [
    "QlsFit",
    "fit_oqls",
    "fit_gqls",
    "fit_mle",
    "fit_sample",
    "asymptotic_cov",
    "qls_weights",
    "DEFAULT_GRID",
]

DEFAULT_GRID = (0.05, 0.95, 25)


@dataclass(frozen=True)
class QlsFit:
    """A fitted location-scale model.

    asy_cov is the full-sample covariance of the estimated parameters (the
    per-observation matrix already divided by n); it is None when the inputs
    required to evaluate it were not supplied.
    """

    kind: str  # "oqls" | "gqls" | "mle"
    params: Params
    mode: ParamMode
    asy_cov: np.ndarray | None = None
    grid: QuantileGrid | None = None
    response: QuantileResponse | None = field(default=None, repr=False)
    warnings: tuple[str, ...] = ()

    @property
    def mu(self) -> float:
        return self.params.mu

    @property
    def sigma(self) -> float:
        return self.params.sigma

    def stderr(self) -> np.ndarray | None:
        if self.asy_cov is None:
            return None
        return np.sqrt(np.diag(self.asy_cov))


def _spd_or_rank_deficient(m: np.ndarray) -> SpdFactor:
    try:
        return spd_factorize(m)
    except NotPositiveDefinite as exc:
        raise RankDeficient(f"design is rank deficient: {exc}") from exc


def _response(y, n):
    if isinstance(y, QuantileResponse):
        return np.asarray(y.values, dtype=float), y.n, tuple(y.warnings)
    vals = np.asarray(y, dtype=float).ravel()
    if n is None:
        raise ValueError("n is required when the response is a bare array")
    return vals, int(n), ()


def _full_design(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != 2:
        raise ValueError(
            "fits take the full k x 2 design [1, Q0(p)]; the parameter mode "
            "selects the columns actually used"
        )
    return x

def _effective(yv: np.ndarray, x: np.ndarray, mode: ParamMode,
               known_mu: float, known_sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """Response/design actually regressed, after absorbing known parameters."""
    if mode is ParamMode.LOCATION_SCALE:
        return yv, x
    if mode is ParamMode.LOCATION_ONLY:
        return yv - known_sigma * x[:, 1], x[:, :1]
    return yv - known_mu, x[:, 1:]


def _assemble_params(beta: np.ndarray, mode: ParamMode,
                     known_mu: float, known_sigma: float) -> tuple[Params, tuple[str, ...]]:
    if mode is ParamMode.LOCATION_SCALE:
        params = Params(mu=float(beta[0]), sigma=float(beta[1]))
    elif mode is ParamMode.LOCATION_ONLY:
        params = Params(mu=float(beta[0]), sigma=float(known_sigma))
    else:
        params = Params(mu=float(known_mu), sigma=float(beta[0]))
    warn = () if params.sigma > 0 else (WARN_NON_POSITIVE_SCALE,)
    if mode is ParamMode.LOCATION_ONLY:
        warn = ()  # scale was supplied, not estimated
    return params, warn


def asymptotic_cov(kind: str, x: np.ndarray, sigma_star_mat: np.ndarray | None,
                   sigma_hat: float, n: int) -> np.ndarray:
    """Asymptotic covariance of the fitted parameters, divided by n.

    x is the effective design (k x m).  For "oqls" the standardized quantile
    covariance is required; identity is assumed when it is None.
    """
    x = np.asarray(x, dtype=float)
    k, m = x.shape
    scale2 = float(sigma_hat) ** 2 / n
    if kind == "gqls":
        if sigma_star_mat is None:
            raise ValueError("gqls covariance requires the quantile covariance")
        ls = spd_factorize(sigma_star_mat)
        xw = scipy.linalg.solve_triangular(ls.lower, x, lower=True)
        g = _spd_or_rank_deficient(xw.T @ xw)
        cov = scale2 * solve_spd(g, np.eye(m))
    elif kind == "oqls":
        g = _spd_or_rank_deficient(x.T @ x)
        if sigma_star_mat is None:
            cov = scale2 * solve_spd(g, np.eye(m))
        else:
            mid = x.T @ np.asarray(sigma_star_mat, dtype=float) @ x
            t1 = solve_spd(g, mid)
            cov = scale2 * solve_spd(g, t1.T)
    else:
        raise ValueError(f"no asymptotic covariance rule for kind {kind!r}")
    return 0.5 * (cov + cov.T)


def fit_oqls(y, x, sigma_star_mat: np.ndarray | None = None, *,
             n: int | None = None, mode: ParamMode = ParamMode.LOCATION_SCALE,
             known_mu: float = 0.0, known_sigma: float = 1.0) -> QlsFit:
    """Ordinary least squares on the quantile regression; x is the full
    k x 2 design.  The covariance is evaluated only when sigma_star_mat is
    given (it enters the sandwich)."""
    yv, n_obs, warns = _response(y, n)
    x = _full_design(x)
    resp, xe = _effective(yv, x, mode, known_mu, known_sigma)
    g = _spd_or_rank_deficient(xe.T @ xe)
    beta = np.atleast_1d(solve_spd(g, xe.T @ resp))
    params, scale_warn = _assemble_params(beta, mode, known_mu, known_sigma)
    cov = None
    if sigma_star_mat is not None:
        cov = asymptotic_cov("oqls", xe, sigma_star_mat, params.sigma, n_obs)
    return QlsFit(kind="oqls", params=params, mode=mode, asy_cov=cov,
                  response=y if isinstance(y, QuantileResponse) else None,
                  warnings=warns + scale_warn)


def fit_gqls(y, x, sigma_star_mat: np.ndarray, *,
             n: int | None = None, mode: ParamMode = ParamMode.LOCATION_SCALE,
             known_mu: float = 0.0, known_sigma: float = 1.0) -> QlsFit:
    """Generalized least squares weighted by the standardized quantile
    covariance, solved via its Cholesky factor."""
    yv, n_obs, warns = _response(y, n)
    x = _full_design(x)
    resp, xe = _effective(yv, x, mode, known_mu, known_sigma)
    ls = spd_factorize(sigma_star_mat)
    xw = scipy.linalg.solve_triangular(ls.lower, xe, lower=True)
    rw = scipy.linalg.solve_triangular(ls.lower, resp, lower=True)
    g = _spd_or_rank_deficient(xw.T @ xw)
    beta = np.atleast_1d(solve_spd(g, xw.T @ rw))
    params, scale_warn = _assemble_params(beta, mode, known_mu, known_sigma)
    m = xe.shape[1]
    cov = (params.sigma ** 2 / n_obs) * solve_spd(g, np.eye(m))
    cov = 0.5 * (cov + cov.T)
    return QlsFit(kind="gqls", params=params, mode=mode, asy_cov=cov,
                  response=y if isinstance(y, QuantileResponse) else None,
                  warnings=warns + scale_warn)


def qls_weights(kind: str, x: np.ndarray, sigma_star_mat: np.ndarray | None = None) -> np.ndarray:
    """The m x k weight matrix W with beta = W @ Y.

    oQLS: (X'X)^-1 X'; gQLS: (X'S^-1 X)^-1 X'S^-1.
    """
    x = np.asarray(x, dtype=float)
    if kind == "oqls":
        g = _spd_or_rank_deficient(x.T @ x)
        return solve_spd(g, x.T)
    if kind == "gqls":
        if sigma_star_mat is None:
            raise ValueError("gqls weights require the quantile covariance")
        ls = spd_factorize(sigma_star_mat)
        a = solve_spd(ls, x)  # S^-1 X
        g = _spd_or_rank_deficient(x.T @ a)
        return solve_spd(g, a.T)
    raise ValueError(f"unknown estimator kind {kind!r}")


# ---------------------------------------------------------------------------
# maximum likelihood baselines
# ---------------------------------------------------------------------------

def _cauchy_ll(theta, x):
    mu, s = theta
    z = (x - mu) / s
    return -x.size * math.log(math.pi * s) - float(np.sum(np.log1p(z * z)))


def _cauchy_score(theta, x):
    mu, s = theta
    z = (x - mu) / s
    w = 1.0 / (1.0 + z * z)
    smu = 2.0 / s * float(np.sum(z * w))
    ssi = (2.0 * float(np.sum(z * z * w)) - x.size) / s
    return np.array([smu, ssi])


def _logistic_ll(theta, x):
    mu, s = theta
    z = (x - mu) / s
    return float(np.sum(-z - 2.0 * np.logaddexp(0.0, -z))) - x.size * math.log(s)


def _logistic_score(theta, x):
    mu, s = theta
    z = (x - mu) / s
    f = special.expit(z)
    smu = (2.0 * float(np.sum(f)) - x.size) / s
    ssi = (float(np.sum(z * (2.0 * f - 1.0))) - x.size) / s
    return np.array([smu, ssi])


def _gumbel_ll(theta, x):
    mu, s = theta
    z = (x - mu) / s
    with np.errstate(over="ignore"):
        e = np.exp(-z)
    val = float(np.sum(-z - e)) - x.size * math.log(s)
    return val if np.isfinite(val) else -np.inf


def _gumbel_score(theta, x):
    mu, s = theta
    z = (x - mu) / s
    with np.errstate(over="ignore"):
        e = np.exp(-z)
    smu = float(np.sum(1.0 - e)) / s
    ssi = (float(np.sum(z * (1.0 - e))) - x.size) / s
    return np.array([smu, ssi])


_NUMERIC_MLE = {
    "cauchy": (_cauchy_ll, _cauchy_score),
    "logistic": (_logistic_ll, _logistic_score),
    "gumbel": (_gumbel_ll, _gumbel_score),
}

_MAX_NEWTON_ITER = 500


def _score_jacobian(score, theta, x):
    m = theta.size
    jac = np.empty((m, m))
    for j in range(m):
        h = 1e-6 * (1.0 + abs(theta[j]))
        up = theta.copy()
        dn = theta.copy()
        up[j] += h
        dn[j] -= h
        if dn[1] <= 0:
            dn[1] = theta[1]  # one-sided near the sigma > 0 boundary
            h = 0.5 * h
        jac[:, j] = (score(up, x) - score(dn, x)) / (up[j] - dn[j])
    return jac


def _newton_mle(ll, score, theta0, x):
    """Maximize the log-likelihood by damped Newton on the analytic score.

    Convergence: parameter step < 1e-9 (1 + |theta|) componentwise and
    relative log-likelihood change < 1e-12.
    """
    theta = np.asarray(theta0, dtype=float).copy()
    cur = ll(theta, x)
    if not np.isfinite(cur):
        raise NoConvergence("log-likelihood not finite at the starting point")
    for it in range(1, _MAX_NEWTON_ITER + 1):
        s = score(theta, x)
        jac = _score_jacobian(score, theta, x)
        try:
            step = np.linalg.solve(jac, -s)
        except np.linalg.LinAlgError:
            step = s / max(1.0, float(np.linalg.norm(s)))
        lam = 1.0
        while theta[1] + lam * step[1] <= 0.0:
            lam *= 0.5
            if lam < 1e-30:
                raise NoConvergence(f"sigma pinned at the boundary (iteration {it})")
        cand = theta
        nxt = cur
        for _ in range(50):
            cand = theta + lam * step
            nxt = ll(cand, x)
            if np.isfinite(nxt) and nxt >= cur - 1e-12 * abs(cur):
                break
            lam *= 0.5
        else:
            raise NoConvergence(f"line search failed at iteration {it}")
        moved = lam * step
        rel = abs(nxt - cur) / max(1.0, abs(nxt))
        theta, cur = cand, nxt
        if np.all(np.abs(moved) < 1e-9 * (1.0 + np.abs(theta))) and rel < 1e-12:
            return theta
    raise NoConvergence(f"Newton did not converge in {_MAX_NEWTON_ITER} iterations")


def _simplex_mle(ll, theta0, x):
    def neg(t):
        if t[1] <= 0:
            return np.inf
        return -ll(t, x)

    res = scipy.optimize.minimize(
        neg, theta0, method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 5000, "maxfev": 10000},
    )
    if not np.isfinite(res.fun):
        raise NoConvergence(f"simplex failed after {res.nit} iterations")
    return np.asarray(res.x, dtype=float)


def _robust_init(fam: Family, data: np.ndarray) -> np.ndarray:
    q25, q50, q75 = np.quantile(data, [0.25, 0.5, 0.75])
    denom = float(fam.qf(0.75) - fam.qf(0.25))
    sigma0 = max((q75 - q25) / denom, 1e-12 * (1.0 + abs(q50)))
    mu0 = q50 - sigma0 * float(fam.qf(0.5))
    return np.array([mu0, sigma0])


def _mle_init(fam: Family, data: np.ndarray) -> np.ndarray:
    try:
        a, b, k = DEFAULT_GRID
        init = fit_sample(data, fam, make_grid(a, b, min(k, max(2, data.size))), method="gqls")
        if init.sigma > 0 and np.isfinite(init.mu) and np.isfinite(init.sigma):
            return np.array([init.mu, init.sigma])
    except Exception:
        pass
    return _robust_init(fam, data)


def fit_mle(fam: Family, data, mode: ParamMode = ParamMode.LOCATION_SCALE, *,
            known_mu: float = 0.0, init=None) -> QlsFit:
    """Maximum likelihood fit.

    Closed forms: normal (mean, population std), laplace (median, mean
    absolute deviation), exponential and levy in scale-only mode with the
    location supplied.  Cauchy, logistic, and gumbel are maximized
    numerically (Newton on the analytic score, simplex fallback), started
    at the gQLS fit.  The joint exponential/levy MLE is not defined here
    (the location parameter sits on the support boundary).
    """
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 2:
        raise EmptySample("MLE needs at least two observations")

    if fam.name in ("exponential", "levy"):
        if mode is not ParamMode.SCALE_ONLY:
            raise Unavailable(
                f"{fam.name}: joint MLE is unavailable; use scale-only mode "
                "with the location supplied"
            )
        shifted = x - known_mu
        if np.any(shifted <= 0.0):
            raise DomainError(f"{fam.name}: all data must exceed the known location")
        if fam.name == "exponential":
            sigma_hat = float(np.mean(shifted))
        else:
            sigma_hat = x.size / float(np.sum(1.0 / shifted))
        params = Params(mu=known_mu, sigma=sigma_hat)
        cov = np.array([[sigma_hat ** 2 / (x.size * fam.fisher_info(mode)[0, 0])]])
        return QlsFit(kind="mle", params=params, mode=mode, asy_cov=cov)

    if mode is not ParamMode.LOCATION_SCALE:
        raise Unavailable(f"{fam.name}: MLE is implemented for the joint mode only")

    if fam.name == "normal":
        params = Params(mu=float(np.mean(x)), sigma=float(np.std(x)))
    elif fam.name == "laplace":
        med = float(np.median(x))
        params = Params(mu=med, sigma=float(np.mean(np.abs(x - med))))
    else:
        ll, score = _NUMERIC_MLE[fam.name]
        theta0 = np.asarray(init, dtype=float) if init is not None else _mle_init(fam, x)
        try:
            theta = _newton_mle(ll, score, theta0, x)
        except NoConvergence:
            theta = _simplex_mle(ll, theta0, x)
        params = Params(mu=float(theta[0]), sigma=float(theta[1]))

    info = fam.fisher_info(ParamMode.LOCATION_SCALE)
    cov = params.sigma ** 2 / x.size * np.linalg.inv(info)
    return QlsFit(kind="mle", params=params, mode=mode, asy_cov=cov)


def fit_sample(data, fam: Family, grid: QuantileGrid, method: str = "gqls",
               mode: ParamMode = ParamMode.LOCATION_SCALE, *,
               known_mu: float = 0.0, known_sigma: float = 1.0) -> QlsFit:
    """Fit raw data: extract quantiles, build the design and quantile
    covariance for the family, and dispatch on the method."""
    if method == "mle":
        return fit_mle(fam, data, mode, known_mu=known_mu)
    y = empirical_quantiles(data, grid)
    x = design_matrix(fam, grid, ParamMode.LOCATION_SCALE)
    s = sigma_star(fam, grid)
    if method == "oqls":
        fit = fit_oqls(y, x, s, mode=mode, known_mu=known_mu, known_sigma=known_sigma)
    elif method == "gqls":
        fit = fit_gqls(y, x, s, mode=mode, known_mu=known_mu, known_sigma=known_sigma)
    else:
        raise ValueError(f"unknown method {method!r}")
    return replace(fit, grid=grid)
