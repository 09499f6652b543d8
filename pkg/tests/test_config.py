import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pmtest import DEFAULT_XI_SWEEP, NU_BAR, TestConfig, XiMeasure, sweep_measures


def test_dirac_measure():
    m = XiMeasure.dirac(0.05)
    assert m.points == (0.05,)
    assert m.weights == (1.0,)
    assert m.is_dirac
    assert m.label == "dirac:0.05"


def test_grid_measure_equal_weights():
    m = XiMeasure.grid([0.1, 0.2, 0.4])
    assert m.points == (0.1, 0.2, 0.4)
    assert m.weights == (1 / 3, 1 / 3, 1 / 3)
    assert not m.is_dirac
    assert m.label == "grid:0.1,0.2,0.4"


@pytest.mark.parametrize("bad", [0.0, -0.1, 1.5, math.inf, math.nan])
def test_xi_out_of_range_rejected(bad):
    with pytest.raises(ValueError):
        XiMeasure.dirac(bad)


def test_measure_validation_errors():
    with pytest.raises(ValueError):
        XiMeasure((0.1, 0.2), (1.0,))
    with pytest.raises(ValueError):
        XiMeasure((0.1, 0.1), (0.5, 0.5))
    with pytest.raises(ValueError):
        XiMeasure((0.1,), (-1.0,))
    with pytest.raises(ValueError):
        XiMeasure.grid([])


def test_parse_round_trip():
    for m in [XiMeasure.dirac(0.07), XiMeasure.grid([0.02, 0.5, 1.0]), NU_BAR]:
        assert XiMeasure.parse(m.label) == m


@pytest.mark.parametrize("text", ["", "0.05", "dirac:", "grid:", "tri:0.1"])
def test_parse_rejects_bare_or_unknown_specs(text):
    with pytest.raises(ValueError):
        XiMeasure.parse(text)


def test_sweep_layout():
    ms = sweep_measures()
    assert len(ms) == len(DEFAULT_XI_SWEEP) + 1
    assert all(m.is_dirac for m in ms[:-1])
    assert tuple(m.points[0] for m in ms[:-1]) == DEFAULT_XI_SWEEP
    assert ms[-1] == NU_BAR
    assert abs(sum(NU_BAR.weights) - 1.0) < 1e-12


@given(st.floats(min_value=1e-6, max_value=1.0, allow_nan=False))
def test_any_xi_in_unit_interval_is_accepted(x):
    m = XiMeasure.dirac(x)
    assert m.points[0] == x


def test_config_defaults():
    c = TestConfig()
    assert c.alpha == 0.05
    assert c.n_bootstrap == 1000
    assert c.tau_n == 2.0
    assert c.xi_measure.is_dirac


@pytest.mark.parametrize(
    "kwargs",
    [
        {"alpha": 0.0},
        {"alpha": 1.0},
        {"n_bootstrap": 0},
        {"tau_n": -1.0},
        {"tau_n": 0.0},
        {"xi0": 0.0},
        {"empty_cell_policy": "ignore"},
        {"treatment_support": (1.0, 1.0)},
        {"treatment_support": (2.0, 1.0)},
    ],
)
def test_config_validation_errors(kwargs):
    with pytest.raises(ValueError):
        TestConfig(**kwargs)


def test_config_accepts_infinite_threshold():
    c = TestConfig(tau_n=math.inf)
    assert math.isinf(c.tau_n)
