import numpy as np
import pytest

from qls.efficiency import are, are_curve, are_table
from qls.errors import Unavailable
from qls.families import ParamMode, get_family
from qls.quantiles import make_grid
from reference_tables import GQLS_ARE, OQLS_ARE_JOINT

MODES = {
    "location": ParamMode.LOCATION_ONLY,
    "scale": ParamMode.SCALE_ONLY,
    "loc-scale": ParamMode.LOCATION_SCALE,
}


def test_gqls_reference_cells_sample():
    # full sweep lives in the acceptance suite; spot-check one cell per block
    assert are("gqls", get_family("normal"), make_grid(0.05, 0.95, 25),
               ParamMode.LOCATION_SCALE).are == pytest.approx(0.911, abs=0.003)
    assert are("gqls", get_family("laplace"), make_grid(0.10, 0.90, 20),
               ParamMode.SCALE_ONLY).are == pytest.approx(0.798, abs=0.003)
    assert are("gqls", get_family("cauchy"), make_grid(0.02, 0.98, 15),
               ParamMode.LOCATION_ONLY).are == pytest.approx(0.986, abs=0.003)


def test_oqls_reference_cells_sample():
    assert are("oqls", get_family("cauchy"), make_grid(0.05, 0.95, 15),
               ParamMode.LOCATION_SCALE).are == pytest.approx(0.181, abs=0.003)
    assert are("oqls", get_family("normal"), make_grid(0.05, 0.95, 200),
               ParamMode.LOCATION_SCALE).are == pytest.approx(
                   OQLS_ARE_JOINT["normal"][200], abs=0.003)


def test_results_are_parameter_free_and_deterministic():
    grid = make_grid(0.05, 0.95, 25)
    v1 = are("gqls", get_family("gumbel"), grid, ParamMode.LOCATION_SCALE).are
    v2 = are("gqls", get_family("gumbel"), grid, ParamMode.LOCATION_SCALE).are
    assert v1 == v2  # bit-identical: no parameters enter the computation


def test_unavailable_cells_carried_in_table():
    fams = [get_family("normal"), get_family("levy")]
    rows = are_table("gqls", fams, [make_grid(0.05, 0.95, 15)],
                     [ParamMode.LOCATION_SCALE, ParamMode.SCALE_ONLY])
    by_key = {(r.family, r.mode): r for r in rows}
    assert by_key[("levy", ParamMode.LOCATION_SCALE)].are is None
    assert by_key[("levy", ParamMode.SCALE_ONLY)].are is not None
    assert by_key[("normal", ParamMode.LOCATION_SCALE)].are is not None
    with pytest.raises(Unavailable):
        are("gqls", get_family("exponential"), make_grid(0.05, 0.95, 15),
            ParamMode.LOCATION_SCALE)


def test_gqls_at_least_as_efficient_as_oqls():
    grid = make_grid(0.05, 0.95, 25)
    for name in ("cauchy", "laplace", "logistic", "normal", "gumbel"):
        fam = get_family(name)
        for mode in MODES.values():
            g = are("gqls", fam, grid, mode).are
            o = are("oqls", fam, grid, mode).are
            assert g >= o - 1e-12


def test_widening_bounds_helps_scale_mode():
    # holds for the lighter-tailed families; cauchy is excluded (its printed
    # reference values run the other way at k=15)
    for name in ("laplace", "logistic", "normal", "gumbel"):
        fam = get_family(name)
        for k in (15, 20, 25):
            narrow = are("gqls", fam, make_grid(0.10, 0.90, k), ParamMode.SCALE_ONLY).are
            mid = are("gqls", fam, make_grid(0.05, 0.95, k), ParamMode.SCALE_ONLY).are
            wide = are("gqls", fam, make_grid(0.02, 0.98, k), ParamMode.SCALE_ONLY).are
            assert narrow <= mid + 1e-12 <= wide + 2e-12


def test_curve_k2_supported_and_flat_tail():
    fam = get_family("normal")
    curve = dict(are_curve("gqls", fam, 0.05, 0.95, range(2, 17)))
    assert 2 in curve
    assert curve[16] - curve[10] < 0.02  # gains level off past k ~ 10


def test_curve_monotone_for_nonseesaw_families():
    ks = list(range(3, 30))
    for name in ("cauchy", "logistic", "normal", "gumbel"):
        vals = [v for _, v in are_curve("gqls", get_family(name), 0.05, 0.95, ks)]
        assert np.all(np.diff(vals) >= -1e-9)


def test_laplace_location_seesaw():
    vals = dict(are_curve("gqls", get_family("laplace"), 0.05, 0.95,
                          range(3, 26), mode=ParamMode.LOCATION_ONLY))
    for k in range(3, 26, 2):
        assert vals[k] == pytest.approx(1.0, abs=1e-9)
    for k in range(4, 26, 2):
        assert vals[k] < 1.0 - 1e-3
    # within each parity the curve is still nondecreasing
    odd = [vals[k] for k in range(3, 26, 2)]
    even = [vals[k] for k in range(4, 26, 2)]
    assert np.all(np.diff(odd) >= -1e-9)
    assert np.all(np.diff(even) >= -1e-9)


def test_oqls_joint_peaks_then_declines():
    # normal, logistic, gumbel peak at moderate k and then slowly decline
    for name in ("normal", "logistic", "gumbel"):
        vals = dict(are_curve("oqls", get_family(name), 0.05, 0.95,
                              [15, 20, 25, 50, 75, 100, 200]))
        assert max(vals.values()) > vals[200]
        assert vals[15] == pytest.approx(OQLS_ARE_JOINT[name][15], abs=0.003)


def test_oqls_cauchy_still_rising_at_200():
    vals = dict(are_curve("oqls", get_family("cauchy"), 0.05, 0.95, [100, 200]))
    assert vals[200] - vals[100] == pytest.approx(0.013, abs=0.004)


def test_curve_range_guard():
    with pytest.raises(ValueError):
        are_curve("gqls", get_family("normal"), 0.05, 0.95, [1])
    with pytest.raises(ValueError):
        are_curve("gqls", get_family("normal"), 0.05, 0.95, [501])


def test_reference_tables_have_expected_shape():
    assert len(GQLS_ARE) == 3
    for block in GQLS_ARE.values():
        assert len(block) == 5
        for fam_block in block.values():
            assert sorted(fam_block) == ["loc-scale", "location", "scale"]
    assert len(OQLS_ARE_JOINT) == 5
