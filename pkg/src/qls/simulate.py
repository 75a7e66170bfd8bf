"""Monte Carlo harness: contamination model, estimator comparisons, power
studies for the goodness-of-fit tests, and timing benchmarks.

Data are drawn from the mixture (1 - eps) F0 + eps G; bias and root-MSE are
always measured against the parameters of the clean component F0.  Every
study is deterministic given its seed: replicate r uses a generator seeded
from (seed, r), and the reduction order is fixed, so worker scheduling
cannot change the summaries.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import gof
from .errors import QlsError
from .families import Family, ParamMode, Params
from .quantiles import QuantileGrid, design_matrix, empirical_quantiles, make_grid, sigma_star
from .estimators import fit_gqls, fit_sample

__all__ = [
    "ContaminationSpec",
    "EstimatorSpec",
    "McConfig",
    "McSummary",
    "ParamSummary",
    "PowerCell",
    "TimingRow",
    "sample_contaminated",
    "run_mc",
    "run_power_study",
    "run_timing",
]


@dataclass(frozen=True)
class ContaminationSpec:
    """Mixture sampler: each observation comes from the contaminant with
    probability epsilon, otherwise from the base distribution."""

    base_family: Family
    base_params: Params = Params()
    contaminant_family: Family | None = None
    contaminant_params: Params | None = None
    epsilon: float = 0.0
    label: str = ""

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.epsilon > 0.0 and self.contaminant_family is None:
            raise ValueError("a contaminant is required when epsilon > 0")
        if not self.label:
            lab = self.base_family.name
            if self.epsilon > 0.0:
                lab = f"{1 - self.epsilon:g}*{lab}+{self.epsilon:g}*{self.contaminant_family.name}"
            object.__setattr__(self, "label", lab)


def sample_contaminated(spec: ContaminationSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n observations from the mixture.  With epsilon = 0 the stream of
    uniforms consumed is identical to plain base-family sampling."""
    x = spec.base_family.sample(spec.base_params, n, rng)
    if spec.epsilon > 0.0:
        mask = rng.random(n) < spec.epsilon
        hits = int(mask.sum())
        if hits:
            x[mask] = spec.contaminant_family.sample(spec.contaminant_params, hits, rng)
    return x


@dataclass(frozen=True)
class EstimatorSpec:
    """One estimator column in a study."""

    method: str  # "mle" | "oqls" | "gqls"
    grid: QuantileGrid | None = None
    mode: ParamMode = ParamMode.LOCATION_SCALE
    known_mu: float = 0.0
    known_sigma: float = 1.0
    label: str = ""

    def __post_init__(self):
        if self.method not in ("mle", "oqls", "gqls"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method != "mle" and self.grid is None:
            raise ValueError(f"{self.method} needs a quantile grid")
        if not self.label:
            if self.method == "mle":
                object.__setattr__(self, "label", "mle")
            else:
                g = self.grid
                object.__setattr__(
                    self, "label", f"{self.method}({g.a:g},{g.b:g},k={g.k})"
                )

    @property
    def param_names(self) -> tuple[str, ...]:
        if self.mode is ParamMode.LOCATION_ONLY:
            return ("mu",)
        if self.mode is ParamMode.SCALE_ONLY:
            return ("sigma",)
        return ("mu", "sigma")


@dataclass(frozen=True)
class McConfig:
    spec: ContaminationSpec
    n: int
    m: int
    estimators: tuple[EstimatorSpec, ...]
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need at least one replicate")
        object.__setattr__(self, "estimators", tuple(self.estimators))


@dataclass(frozen=True)
class ParamSummary:
    mean: float
    bias: float
    sqrt_mse: float
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    n_used: int


@dataclass(frozen=True)
class McSummary:
    config: McConfig
    stats: dict  # label -> param -> ParamSummary
    failures: dict  # label -> count

    def as_rows(self) -> list[dict]:
        rows = []
        for label, per_param in self.stats.items():
            for pname, s in per_param.items():
                rows.append({
                    "estimator": label, "parameter": pname, "mean": s.mean,
                    "bias": s.bias, "sqrt_mse": s.sqrt_mse, "min": s.minimum,
                    "q1": s.q1, "median": s.median, "q3": s.q3, "max": s.maximum,
                    "n_used": s.n_used, "failures": self.failures[label],
                })
        return rows


def _fit_estimates(est: EstimatorSpec, fam: Family, data: np.ndarray) -> tuple[float, ...]:
    fit = fit_sample(data, fam, est.grid, est.method, est.mode,
                     known_mu=est.known_mu, known_sigma=est.known_sigma)
    if est.mode is not ParamMode.LOCATION_ONLY and not fit.sigma > 0:
        raise QlsError("non-positive scale estimate")
    if est.mode is ParamMode.LOCATION_ONLY:
        return (fit.mu,)
    if est.mode is ParamMode.SCALE_ONLY:
        return (fit.sigma,)
    return (fit.mu, fit.sigma)


def _mc_chunk(config: McConfig, rep_range: range) -> np.ndarray:
    fam = config.spec.base_family
    n_est = len(config.estimators)
    out = np.full((len(rep_range), n_est, 2), np.nan)
    for row, r in enumerate(rep_range):
        rng = np.random.default_rng([config.seed, r])
        data = sample_contaminated(config.spec, config.n, rng)
        for j, est in enumerate(config.estimators):
            try:
                vals = _fit_estimates(est, fam, data)
            except QlsError:
                continue
            for c, v in enumerate(vals):
                out[row, j, c] = v
    return out


def _five_number(v: np.ndarray) -> tuple[float, float, float, float, float]:
    q = np.quantile(v, [0.0, 0.25, 0.5, 0.75, 1.0])
    return tuple(float(t) for t in q)


def run_mc(config: McConfig) -> McSummary:
    """Fit every estimator on every replicate; summarize against the clean
    base parameters.  Replicates whose fit fails (non-convergence or a
    non-positive scale) are excluded from the summaries and counted."""
    m = config.m
    if config.workers > 1:
        chunks = np.array_split(np.arange(m), config.workers)
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(
                lambda idx: _mc_chunk(config, range(int(idx[0]), int(idx[-1]) + 1)),
                [c for c in chunks if c.size],
            ))
        estimates = np.concatenate(parts, axis=0)
    else:
        estimates = _mc_chunk(config, range(m))

    truth = {"mu": config.spec.base_params.mu, "sigma": config.spec.base_params.sigma}
    stats: dict = {}
    failures: dict = {}
    for j, est in enumerate(config.estimators):
        per_param: dict = {}
        n_fail = 0
        for c, pname in enumerate(est.param_names):
            col = estimates[:, j, c]
            ok = col[np.isfinite(col)]
            n_fail = max(n_fail, m - ok.size)
            if ok.size == 0:
                continue
            mean = float(np.mean(ok))
            bias = mean - truth[pname]
            sqrt_mse = float(np.sqrt(np.mean((ok - truth[pname]) ** 2)))
            mn, q1, med, q3, mx = _five_number(ok)
            per_param[pname] = ParamSummary(mean=mean, bias=bias, sqrt_mse=sqrt_mse,
                                            minimum=mn, q1=q1, median=med, q3=q3,
                                            maximum=mx, n_used=ok.size)
        stats[est.label] = per_param
        failures[est.label] = n_fail
    return McSummary(config=config, stats=stats, failures=failures)


# ---------------------------------------------------------------------------
# goodness-of-fit power studies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerCell:
    h0_family: str
    generator: str
    a: float
    b: float
    k: int
    n: int
    m: int
    test: str
    alpha: float
    rejection_rate: float
    failures: int


def run_power_study(h0_families, generators, grids, n: int, m: int,
                    alpha: float = 0.05, test: str = "w", B: int = 1000,
                    out_grid: gof.OutGrid | None = None, seed: int = 0) -> list[PowerCell]:
    """Rejection-proportion table over (H0 family) x (data generator) x grid.

    generators are ContaminationSpec values (epsilon = 0 gives a pure
    family).  test "w" uses the in-sample statistic at its chi-square
    critical value; "wout" calibrates the out-of-sample statistic with a
    B-replicate parametric bootstrap per Monte Carlo replicate.
    """
    if test not in ("w", "wout"):
        raise ValueError(f"unknown test {test!r}")
    if out_grid is None:
        out_grid = gof.default_out_grid()
    cells: list[PowerCell] = []
    for i_h0, h0 in enumerate(h0_families):
        for i_gen, gen in enumerate(generators):
            for i_grid, grid in enumerate(grids):
                x = design_matrix(h0, grid, ParamMode.LOCATION_SCALE)
                s = sigma_star(h0, grid)
                rejections = 0
                failures = 0
                used = 0
                rep_seeds = np.random.default_rng(
                    [seed, i_h0, i_gen, i_grid]
                ).integers(0, 2 ** 62, size=m)
                for r in range(m):
                    rng = np.random.default_rng([seed, i_h0, i_gen, i_grid, r])
                    data = sample_contaminated(gen, n, rng)
                    try:
                        if test == "w":
                            y = empirical_quantiles(data, grid)
                            fit = fit_gqls(y, x, s)
                            res = gof.w_test(y, x, s, fit)
                        else:
                            res = gof.bootstrap_pvalue(
                                data, h0, grid, out_grid, B=B, seed=int(rep_seeds[r])
                            )
                    except QlsError:
                        failures += 1
                        continue
                    used += 1
                    if res.p_value <= alpha:
                        rejections += 1
                rate = rejections / used if used else float("nan")
                cells.append(PowerCell(
                    h0_family=h0.name, generator=gen.label, a=grid.a, b=grid.b,
                    k=grid.k, n=n, m=m, test=test, alpha=alpha,
                    rejection_rate=rate, failures=failures,
                ))
    return cells


# ---------------------------------------------------------------------------
# timing benchmarks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimingRow:
    family: str
    method: str
    n: int
    sample_seconds: float
    fit_seconds: float
    repeats: int
    timed_out: bool


def run_timing(families, methods, sizes, repeats: int = 3,
               grid: QuantileGrid | None = None, timeout: float | None = None,
               seed: int = 0) -> list[TimingRow]:
    """Median wall-clock sampling and fitting times.  Sampling time is kept
    separate from fitting time; a cell whose single fit exceeds the timeout
    is marked and not repeated further (its partial median is reported)."""
    if grid is None:
        grid = make_grid(0.05, 0.95, 25)
    rows: list[TimingRow] = []
    for i_f, fam in enumerate(families):
        for method in methods:
            mode = (ParamMode.SCALE_ONLY
                    if method == "mle" and fam.name in ("exponential", "levy")
                    else ParamMode.LOCATION_SCALE)
            for i_n, n in enumerate(sizes):
                t_sample: list[float] = []
                t_fit: list[float] = []
                timed_out = False
                for r in range(repeats):
                    rng = np.random.default_rng([seed, i_f, i_n, r])
                    t0 = time.perf_counter()
                    data = fam.sample(Params(), int(n), rng)
                    t1 = time.perf_counter()
                    fit_sample(data, fam, grid, method, mode)
                    t2 = time.perf_counter()
                    t_sample.append(t1 - t0)
                    t_fit.append(t2 - t1)
                    if timeout is not None and t2 - t1 > timeout:
                        timed_out = True
                        break
                rows.append(TimingRow(
                    family=fam.name, method=method, n=int(n),
                    sample_seconds=float(np.median(t_sample)),
                    fit_seconds=float(np.median(t_fit)),
                    repeats=len(t_fit), timed_out=timed_out,
                ))
    return rows
