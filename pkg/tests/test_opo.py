import dataclasses
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from opo_squeeze.model import DEFAULT_OPO, AboveThresholdError, DomainError
from opo_squeeze.opo import (
    cavity_rates,
    effective_threshold,
    escape_efficiency,
    gain_sweep,
    gain_with_induced_loss,
    induced_loss,
    loss_from_finesse,
    opo_threshold,
    parametric_gain,
    pump_parameter_from_gain,
)

DEGENERATE = dataclasses.replace(DEFAULT_OPO, loss_slope=0.0,
                                 loss_intercept=DEFAULT_OPO.l2_base)


def test_threshold_defaults():
    assert opo_threshold(DEFAULT_OPO) == pytest.approx(0.2058, abs=5e-5)
    assert opo_threshold(DEFAULT_OPO) == pytest.approx(
        oracles.threshold(0.115, 0.004, 0.0185, 0.93), rel=1e-15)


def test_threshold_without_alpha():
    assert opo_threshold(dataclasses.replace(DEFAULT_OPO, alpha=1.0)) == pytest.approx(0.1914, abs=5e-5)


def test_threshold_l2_override():
    p = dataclasses.replace(DEFAULT_OPO, alpha=1.0)
    assert opo_threshold(p, l2_override=0.0) == pytest.approx(0.115**2 / 0.074, rel=1e-14)
    assert opo_threshold(p, l2_override=0.0) == pytest.approx(0.17872, abs=1e-5)
    with pytest.raises(DomainError):
        opo_threshold(p, l2_override=1.0)


@pytest.mark.parametrize("field, delta, sign", [
    ("l2_base", 1e-4, +1), ("alpha", -1e-3, +1), ("e_nl_opo", 1e-4, -1),
])
def test_threshold_monotonicity(field, delta, sign):
    base = opo_threshold(DEFAULT_OPO)
    moved = opo_threshold(dataclasses.replace(DEFAULT_OPO, **{field: getattr(DEFAULT_OPO, field) + delta}))
    assert sign * (moved - base) > 0


def test_gain_zero_and_quarter():
    gp = parametric_gain(0.0, 0.2)
    assert (gp.gain, gp.pump_parameter) == (1.0, 0.0)
    gp = parametric_gain(0.05, 0.2)
    assert gp.gain == pytest.approx(4.0, rel=1e-15)
    assert gp.pump_parameter == pytest.approx(0.5, rel=1e-15)


def test_gain_at_84mw():
    gp = parametric_gain(0.084, 0.2058)
    assert gp.gain == pytest.approx(7.67, abs=0.01)
    assert gp.threshold_used == 0.2058


@pytest.mark.parametrize("pump", [0.2058, 0.3])
def test_gain_above_threshold(pump):
    with pytest.raises(AboveThresholdError) as info:
        parametric_gain(pump, 0.2058)
    assert info.value.pump_power == pump


@given(st.floats(min_value=0.0, max_value=0.999), st.floats(min_value=1e-3, max_value=10.0))
def test_gain_point_self_consistent(frac, threshold):
    p = frac * threshold
    gp = parametric_gain(p, threshold)
    assert gp.gain == pytest.approx(1 / (1 - gp.pump_parameter) ** 2, rel=1e-12)
    assert gp.pump_parameter == pytest.approx(math.sqrt(p / threshold), rel=1e-12, abs=1e-300)
    assert pump_parameter_from_gain(gp.gain) == pytest.approx(math.sqrt(p / threshold), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("gain, x", [(1.0, 0.0), (4.0, 0.5), (5.2, 0.5615)])
def test_pump_parameter_from_gain(gain, x):
    assert pump_parameter_from_gain(gain) == pytest.approx(x, abs=5e-5)


def test_pump_parameter_rejects_sub_unity_gain():
    with pytest.raises(DomainError):
        pump_parameter_from_gain(0.99)


@pytest.mark.parametrize("pump, loss", [(0.0, 0.00445), (0.084, 0.01013), (1.0, 0.07212)])
def test_induced_loss(pump, loss):
    assert induced_loss(DEFAULT_OPO, pump) == pytest.approx(loss, abs=5e-6)


def test_induced_loss_unphysical():
    with pytest.raises(DomainError):
        induced_loss(DEFAULT_OPO, 20.0)


@pytest.mark.parametrize("finesse, loss", [(1570, 0.0040), (2 * math.pi * 1000, 0.001), (628.32, 0.01)])
def test_loss_from_finesse(finesse, loss):
    assert loss_from_finesse(finesse) == pytest.approx(loss, rel=1e-3)


def test_loss_from_finesse_domain():
    with pytest.raises(DomainError):
        loss_from_finesse(2 * math.pi)


@given(st.floats(min_value=1e-6, max_value=0.1))
def test_finesse_round_trip(x):
    assert loss_from_finesse(2 * math.pi / x) == pytest.approx(x, rel=1e-12)


def test_escape_efficiency():
    assert escape_efficiency(0.115, 0.004) == pytest.approx(0.9664, abs=5e-5)
    assert escape_efficiency(0.2, 0.0) == 1.0
    assert escape_efficiency(0.115, 0.01013) == pytest.approx(0.9190, abs=5e-5)
    with pytest.raises(DomainError):
        escape_efficiency(0.0, 0.01)


@given(st.floats(min_value=1e-3, max_value=1.0), st.floats(min_value=0.0, max_value=0.5),
       st.floats(min_value=1e-6, max_value=0.5))
def test_escape_efficiency_bounds_and_monotone(t2, l2, dl):
    rho = escape_efficiency(t2, l2)
    assert 0 < rho <= 1
    assert escape_efficiency(t2, l2 + dl) < rho


def test_cavity_rates():
    r = cavity_rates(0.115, 0.004, 0.6, 2e6)
    assert r.decay_rate == pytest.approx(5.946e7, rel=1e-4)
    assert r.detuning == pytest.approx(0.2113, abs=5e-5)
    assert r.detuning == 2 * math.pi * r.analysis_frequency / r.decay_rate
    assert cavity_rates(0.115, 0.004, 0.6, 0.0).detuning == 0.0
    assert cavity_rates(0.115, 0.01013, 0.6, 2e6).detuning == pytest.approx(0.2010, abs=5e-5)


@pytest.mark.parametrize("args", [(0.115, 0.004, 0.0, 2e6), (0.115, 0.004, 0.6, -1.0)])
def test_cavity_rates_domain(args):
    with pytest.raises(DomainError):
        cavity_rates(*args)


def test_effective_threshold():
    assert effective_threshold(DEFAULT_OPO, 0.0) == pytest.approx(0.2073, abs=5e-5)
    assert effective_threshold(DEFAULT_OPO, 0.084) == pytest.approx(0.2275, abs=5e-5)
    assert effective_threshold(DEGENERATE, 0.1) == opo_threshold(DEGENERATE)
    assert effective_threshold(DEFAULT_OPO, 0.0) >= opo_threshold(DEFAULT_OPO)


def test_gain_with_induced_loss():
    assert gain_with_induced_loss(DEFAULT_OPO, 0.0).gain == 1.0
    gp = gain_with_induced_loss(DEFAULT_OPO, 0.084)
    assert gp.gain == pytest.approx(6.49, abs=0.01)
    assert gp.threshold_used == effective_threshold(DEFAULT_OPO, 0.084)
    assert gain_with_induced_loss(DEGENERATE, 0.084) == parametric_gain(0.084, opo_threshold(DEGENERATE))


def test_gain_with_induced_loss_above_threshold():
    with pytest.raises(AboveThresholdError):
        gain_with_induced_loss(DEFAULT_OPO, 0.3)


@pytest.mark.parametrize("corrected", [False, True])
def test_gain_sweep_endpoints_and_monotone(corrected):
    rows = gain_sweep(DEFAULT_OPO, 0.0, 0.2, 41, corrected=corrected)
    first = gain_with_induced_loss(DEFAULT_OPO, 0.0) if corrected else parametric_gain(0.0, opo_threshold(DEFAULT_OPO))
    last = gain_with_induced_loss(DEFAULT_OPO, 0.2) if corrected else parametric_gain(0.2, opo_threshold(DEFAULT_OPO))
    assert rows[0] == first and rows[-1] == last
    gains = [r.gain for r in rows]
    assert all(b > a for a, b in zip(gains, gains[1:]))


def test_corrected_gain_below_ideal():
    ideal = gain_sweep(DEFAULT_OPO, 0.0, 0.2, 201)
    corrected = gain_sweep(DEFAULT_OPO, 0.0, 0.2, 201, corrected=True)
    assert all(c.gain <= i.gain for c, i in zip(corrected, ideal))


def test_gain_sweep_names_first_bad_power():
    with pytest.raises(AboveThresholdError) as info:
        gain_sweep(DEFAULT_OPO, 0.0, 0.3, 31)
    assert info.value.pump_power == pytest.approx(0.21)
