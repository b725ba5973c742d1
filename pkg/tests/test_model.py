import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from opo_squeeze.model import (
    CONSTANTS,
    DEFAULT_DETECTION,
    DEFAULT_OPO,
    DEFAULT_SHG,
    DetectionChain,
    DomainError,
    Fraction,
    OpoParams,
    Power,
    ShgParams,
    db_from_linear,
    linear_from_db,
    linear_grid,
    log_grid,
    validate,
)


def test_speed_of_light():
    assert CONSTANTS.speed_of_light == 299792458


@pytest.mark.parametrize("r, expected", [(1.0, 0.0), (10.0, 10.0), (0.202617, -6.9332)])
def test_db_from_linear(r, expected):
    assert db_from_linear(r) == pytest.approx(expected, abs=1e-4)


@pytest.mark.parametrize("d, expected", [(0.0, 1.0), (10.0, 10.0), (-5.6, 0.27542)])
def test_linear_from_db(d, expected):
    assert linear_from_db(d) == pytest.approx(expected, rel=1e-4)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_db_from_linear_rejects(bad):
    with pytest.raises(DomainError):
        db_from_linear(bad)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_linear_from_db_rejects(bad):
    with pytest.raises(DomainError):
        linear_from_db(bad)


@given(st.floats(min_value=1e-6, max_value=1e6))
def test_db_round_trip(r):
    assert linear_from_db(db_from_linear(r)) == pytest.approx(r, rel=1e-12)


@pytest.mark.parametrize("bad", [-1e-12, math.nan, math.inf])
def test_power_rejects(bad):
    with pytest.raises(DomainError):
        Power(bad)


@pytest.mark.parametrize("bad", [-0.1, 1.0000001, math.nan, -math.inf])
def test_fraction_rejects(bad):
    with pytest.raises(DomainError):
        Fraction(bad)


def test_constructors_accept_bounds():
    assert Power(0) == 0.0
    assert Fraction(0) == 0.0 and Fraction(1) == 1.0


def test_defaults_are_valid():
    assert validate(ShgParams(0.10, 0.015, 0.023, 0.22)) == []
    for params in (DEFAULT_SHG, DEFAULT_OPO, DEFAULT_DETECTION):
        assert validate(params) == []


def test_gamma_is_derived():
    assert DEFAULT_SHG.gamma == pytest.approx(1.22 * 0.023, rel=1e-15)
    assert DEFAULT_SHG.gamma_abs == pytest.approx(0.22 * 0.023, rel=1e-15)


def test_t1_zero_is_violation():
    violations = validate(ShgParams(0.0, 0.015, 0.023, 0.22))
    assert [v.field for v in violations] == ["t1"]
    assert violations[0].value == 0.0


def test_alpha_above_one_is_violation():
    params = OpoParams(0.115, 0.004, 0.0185, 1.2, 0.6, 0.00445, 0.06767)
    assert [v.field for v in validate(params)] == ["alpha"]


def test_every_violation_reported():
    params = ShgParams(t1=1.0, l1=-0.1, e_nl=0.0, gamma_abs_ratio=-1)
    assert [v.field for v in validate(params)] == ["t1", "l1", "e_nl", "gamma_abs_ratio"]


def test_detection_chain_bounds():
    assert [v.field for v in validate(DetectionChain(0.0, 1.0, 1.2))] == [
        "quantum_efficiency", "propagation"]


def test_non_finite_field_is_violation():
    assert validate(ShgParams(0.1, math.nan, 0.023))[0].field == "l1"


def test_validate_rejects_other_types():
    with pytest.raises(TypeError):
        validate(object())


def test_linear_grid_endpoints_exact():
    g = linear_grid(0.001, 0.24, 50)
    assert len(g) == 50 and g[0] == 0.001 and g[-1] == 0.24
    assert all(b > a for a, b in zip(g, g[1:]))


def test_log_grid_endpoints_exact():
    g = log_grid(2e5, 1e7, 7)
    assert g[0] == 2e5 and g[-1] == 1e7


@pytest.mark.parametrize("args", [(0.1, 0.1, 5), (0.2, 0.1, 5), (0, 1, 1), (0, 1, 2.5)])
def test_linear_grid_rejects(args):
    with pytest.raises(DomainError):
        linear_grid(*args)


def test_log_grid_needs_positive_start():
    with pytest.raises(DomainError):
        log_grid(0.0, 1.0, 5)
