import math

import numpy as np
import pytest
from scipy import integrate

from qls.errors import (
    BootstrapDegenerate,
    InsufficientDof,
    InvalidGrid,
    NonPositiveScale,
)
from qls.estimators import fit_gqls, fit_mle, fit_sample
from qls.families import ParamMode, Params, get_family
from qls.gof import (
    bootstrap_pvalue,
    chi2_sf,
    default_out_grid,
    make_out_grid,
    q_decomposition,
    residual_analysis,
    w_out_statistic,
    w_test,
)
from qls.quantiles import (
    QuantileResponse,
    design_matrix,
    empirical_quantiles,
    make_grid,
    sigma_star,
)

NORMAL = get_family("normal")
GRID = make_grid(0.05, 0.95, 25)
X = design_matrix(NORMAL, GRID)
S = sigma_star(NORMAL, GRID)


def normal_fit(n=1000, seed=0, mu=0.0, sigma=1.0):
    data = NORMAL.sample(Params(mu, sigma), n, np.random.default_rng(seed))
    y = empirical_quantiles(data, GRID)
    return data, y, fit_gqls(y, X, S)


# ---------------------------------------------------------------------------
# chi-square survival function
# ---------------------------------------------------------------------------

def test_chi2_sf_basics():
    assert chi2_sf(0.0, 5) == 1.0
    assert chi2_sf(2.0 * math.log(20.0), 2) == pytest.approx(0.05, abs=1e-12)


def test_chi2_sf_matches_quadrature_oracle():
    dof = 23

    def density(t):
        return t ** (dof / 2 - 1) * math.exp(-t / 2) / (2 ** (dof / 2) * math.gamma(dof / 2))

    tail, _ = integrate.quad(density, 23.0, np.inf, limit=300)
    assert chi2_sf(23.0, dof) == pytest.approx(tail, abs=1e-8)


def test_chi2_sf_monotonicity():
    xs = np.linspace(0.1, 60.0, 40)
    vals = [chi2_sf(x, 10) for x in xs]
    assert np.all(np.diff(vals) < 0)
    for x in (12.0, 30.0):
        assert chi2_sf(x, 4) < chi2_sf(x, 8) < chi2_sf(x, 11)
    with pytest.raises(ValueError):
        chi2_sf(-1.0, 3)
    with pytest.raises(ValueError):
        chi2_sf(1.0, 0)


# ---------------------------------------------------------------------------
# residual diagnostics and the quadratic-form identity
# ---------------------------------------------------------------------------

def test_residuals_zero_on_exact_fit():
    y = QuantileResponse(values=X @ np.array([0.3, 1.2]), n=500)
    fit = fit_gqls(y, X, S)
    diag = residual_analysis(y, X, fit, S)
    assert np.max(np.abs(diag.residuals)) < 1e-10
    assert np.allclose(diag.fitted, y.values)


def test_residual_covariances():
    _, y, fit = normal_fit(seed=3)
    diag = residual_analysis(y, X, fit, S)
    rc = diag.residual_cov
    assert np.allclose(rc, rc.T)
    assert np.min(np.linalg.eigvalsh(rc)) > -1e-10
    # the residual and fitted covariances tile the response covariance
    total = rc + diag.fitted_cov
    assert np.allclose(total, fit.sigma ** 2 / y.n * S, atol=1e-12)
    # asymptotic independence: H S (I - H)' vanishes for the gQLS projector
    sc = fit.sigma ** 2 / y.n
    hs = diag.fitted_cov / sc          # X (X'S^-1X)^-1 X'
    ls = np.linalg.inv(S)
    h = hs @ ls
    cross = sc * (hs - h @ hs)
    assert np.max(np.abs(cross)) < 1e-9


def test_residual_analysis_refuses_wrong_fits():
    data, y, fit = normal_fit(seed=4)
    ofit = fit_sample(data, NORMAL, GRID, "oqls")
    with pytest.raises(ValueError):
        residual_analysis(y, X, ofit, S)
    mfit = fit_mle(NORMAL, data)
    with pytest.raises(ValueError):
        residual_analysis(y, X, mfit, S)


def test_q_decomposition_identity_and_true_beta():
    truth = Params(0.5, 2.0)
    data = NORMAL.sample(truth, 2000, np.random.default_rng(12))
    y = empirical_quantiles(data, GRID)
    fit = fit_gqls(y, X, S)
    q, q1, q2 = q_decomposition(y, X, S, truth, fit)
    assert abs(q - q1 - q2) <= 1e-8 * max(q, 1.0)
    assert q1 >= 0 and q2 >= 0
    # evaluating at beta_true = beta_hat zeroes the parameter term
    q_, q1_, q2_ = q_decomposition(
        y, X, S, Params(fit.mu, fit.sigma), fit)
    assert q2_ == pytest.approx(0.0, abs=1e-10)
    assert q_ == pytest.approx(q1_, rel=1e-12)


def test_q1_mean_matches_dof():
    m = 400
    vals = []
    for r in range(m):
        data = NORMAL.sample(Params(0, 1), 1000, np.random.default_rng([77, r]))
        y = empirical_quantiles(data, GRID)
        fit = fit_gqls(y, X, S)
        _, q1, _ = q_decomposition(y, X, S, Params(0, 1), fit)
        vals.append(q1)
    assert 21.5 <= np.mean(vals) <= 24.5  # dof = k - 2 = 23


# ---------------------------------------------------------------------------
# in-sample test
# ---------------------------------------------------------------------------

def test_w_perfect_fit():
    y = QuantileResponse(values=X @ np.array([1.0, 2.0]), n=800)
    fit = fit_gqls(y, X, S)
    res = w_test(y, X, S, fit)
    assert res.statistic == pytest.approx(0.0, abs=1e-16)
    assert res.p_value == 1.0
    assert res.dof == 23


def test_w_dof2_reference_pvalue():
    g4 = make_grid(0.2, 0.8, 4)
    x4 = design_matrix(NORMAL, g4)
    s4 = sigma_star(NORMAL, g4)
    data, _, _ = normal_fit(seed=9)
    y4 = empirical_quantiles(data, g4)
    fit = fit_gqls(y4, x4, s4)
    res = w_test(y4, x4, s4, fit)
    assert res.dof == 2
    # dof-2 tail is exp(-W/2)
    assert res.p_value == pytest.approx(math.exp(-res.statistic / 2.0), rel=1e-12)


def test_w_requires_dof_and_gqls_and_scale():
    g2 = make_grid(0.25, 0.75, 2)
    x2 = design_matrix(NORMAL, g2)
    s2 = sigma_star(NORMAL, g2)
    data = NORMAL.sample(Params(0, 1), 100, np.random.default_rng(0))
    y2 = empirical_quantiles(data, g2)
    fit = fit_gqls(y2, x2, s2)
    with pytest.raises(InsufficientDof):
        w_test(y2, x2, s2, fit)
    y = empirical_quantiles(data, GRID)
    ofit = fit_sample(data, NORMAL, GRID, "oqls")
    with pytest.raises(ValueError):
        w_test(y, X, S, ofit)


def test_w_affine_invariance():
    data, y, fit = normal_fit(seed=21)
    base = w_test(y, X, S, fit).statistic
    moved_data = 3.5 * data - 7.0
    y2 = empirical_quantiles(moved_data, GRID)
    fit2 = fit_gqls(y2, X, S)
    moved = w_test(y2, X, S, fit2).statistic
    assert moved == pytest.approx(base, rel=1e-8)


def test_w_level_mini_calibration():
    m, rej = 500, 0
    for r in range(m):
        data = NORMAL.sample(Params(0, 1), 1000, np.random.default_rng([5, r]))
        y = empirical_quantiles(data, GRID)
        fit = fit_gqls(y, X, S)
        rej += w_test(y, X, S, fit).p_value <= 0.05
    assert 0.02 <= rej / m <= 0.09


# ---------------------------------------------------------------------------
# out-of-sample test
# ---------------------------------------------------------------------------

def test_default_out_grid_levels():
    og = default_out_grid()
    assert og.r == 50
    assert og.levels[0] == pytest.approx(0.01)
    assert og.levels[1] == pytest.approx(0.03)
    assert og.levels[-1] == pytest.approx(0.99)
    with pytest.raises(InvalidGrid):
        make_out_grid([0.2, 0.2, 0.5])
    with pytest.raises(InvalidGrid):
        make_out_grid([0.0, 0.5])


def test_w_out_equals_w_on_matching_grid():
    data, y, fit = normal_fit(seed=33)
    w = w_test(y, X, S, fit).statistic
    og = make_out_grid(GRID.levels)
    wout = w_out_statistic(data, fit, NORMAL, og)
    assert wout == pytest.approx(w, rel=1e-12)


def test_w_out_zero_on_exact_agreement():
    data, y, fit = normal_fit(seed=40)
    og = make_out_grid([0.2, 0.5, 0.8])
    x_out = design_matrix(NORMAL, og)
    # synthesize data whose out-quantiles sit exactly on the fitted line:
    # directly verify the quadratic form at the fitted quantiles is zero
    beta = np.array([fit.mu, fit.sigma])
    resid = x_out @ beta - x_out @ beta
    assert np.all(resid == 0.0)
    # and through the API: quantiles of the fitted line evaluated as data
    synth = fit.mu + fit.sigma * np.asarray(NORMAL.qf(np.linspace(0.001, 0.999, 4001)))
    fit_synth = fit_sample(synth, NORMAL, GRID, "gqls")
    wout = w_out_statistic(synth, fit_synth, NORMAL, og)
    assert wout < 1.0  # near-exact location-scale data gives a tiny statistic


def test_bootstrap_counting_rule():
    data, _, _ = normal_fit(n=400, seed=50)
    res = bootstrap_pvalue(data, NORMAL, GRID, B=1, seed=1)
    assert res.p_value in (0.0, 1.0)
    assert res.b_replicates == 1
    res = bootstrap_pvalue(data, NORMAL, GRID, B=60, seed=2)
    assert 0.0 <= res.p_value <= 1.0
    assert res.kind == "out-of-sample"
    assert res.decision_at[0.05] == (res.p_value <= 0.05)


def test_bootstrap_seed_reproducible():
    data, _, _ = normal_fit(n=400, seed=51)
    a = bootstrap_pvalue(data, NORMAL, GRID, B=40, seed=7)
    b = bootstrap_pvalue(data, NORMAL, GRID, B=40, seed=7)
    assert a.p_value == b.p_value and a.statistic == b.statistic


def test_bootstrap_rejects_wrong_model():
    # heavy-tailed data tested against a normal null: decisive rejection
    cauchy = get_family("cauchy")
    data = cauchy.sample(Params(0, 1), 1000, np.random.default_rng(8))
    res = bootstrap_pvalue(data, NORMAL, GRID, B=120, seed=3)
    assert res.p_value <= 0.05


def test_bootstrap_requires_positive_scale():
    with pytest.raises(NonPositiveScale):
        bootstrap_pvalue(np.zeros(100), NORMAL, GRID, B=10, seed=0)
