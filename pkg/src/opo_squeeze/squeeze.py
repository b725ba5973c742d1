"""Detected squeezing and anti-squeezing of a sub-threshold OPO.

Quadrature variances relative to shot noise::

    R_minus = 1 - eta * 4x / ((1 + x)**2 + 4 Omega**2)
    R_plus  = 1 + eta * 4x / ((1 - x)**2 + 4 Omega**2)

with ``eta`` the total detection efficiency (photodiode, visibility squared,
propagation, escape), ``x`` the pump parameter and ``Omega`` the sideband
frequency normalised to the cavity decay rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    DetectionChain,
    DomainError,
    Fraction,
    OpoParams,
    db_from_linear,
    linear_grid,
    log_grid,
    require_valid,
)
from .opo import (
    cavity_rates,
    escape_efficiency,
    gain_with_induced_loss,
    induced_loss,
    opo_threshold,
    parametric_gain,
    pump_parameter_from_gain,
)

MODES = ("ideal", "corrected")


@dataclass(frozen=True)
class QuadratureNoise:
    r_minus: float
    r_plus: float
    r_minus_db: float
    r_plus_db: float
    pump_parameter: float
    detuning: float
    total_efficiency: float


@dataclass(frozen=True)
class EfficiencyBudget:
    photodiode: float
    visibility_squared: float
    propagation: float
    escape: float
    total: float


def total_detection_efficiency(chain: DetectionChain, escape) -> EfficiencyBudget:
    require_valid(chain)
    rho = float(Fraction(escape))
    if rho == 0.0:
        raise DomainError("escape efficiency must be > 0")
    vis2 = chain.visibility**2
    return EfficiencyBudget(
        photodiode=chain.quantum_efficiency,
        visibility_squared=vis2,
        propagation=chain.propagation,
        escape=rho,
        total=chain.quantum_efficiency * vis2 * chain.propagation * rho,
    )


def noise_variances(x, detuning, total_efficiency) -> QuadratureNoise:
    x = float(x)
    omega = float(detuning)
    eta = float(Fraction(total_efficiency))
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"pump parameter must be >= 0, got {x!r}")
    if x >= 1.0:
        raise DomainError(f"pump parameter {x!r} is at or above threshold")
    if not math.isfinite(omega) or omega < 0:
        raise DomainError(f"detuning must be >= 0, got {detuning!r}")
    four_omega2 = 4.0 * omega**2
    lo = (1.0 - x) ** 2 + four_omega2
    hi = (1.0 + x) ** 2 + four_omega2
    dip = eta * 4.0 * x / hi
    if dip <= 0.5:
        r_minus = 1.0 - dip
    else:
        # same quantity as a sum of non-negative terms; avoids cancellation
        # when the squeezed variance is tiny
        r_minus = (lo + 4.0 * x * (1.0 - eta)) / hi
    r_plus = 1.0 + eta * 4.0 * x / lo
    return QuadratureNoise(
        r_minus=r_minus,
        r_plus=r_plus,
        r_minus_db=db_from_linear(r_minus),
        r_plus_db=db_from_linear(r_plus),
        pump_parameter=x,
        detuning=omega,
        total_efficiency=eta,
    )


def predict_from_measured_gain(opo: OpoParams, chain: DetectionChain, measured_gain,
                               pump_power, analysis_frequency) -> QuadratureNoise:
    """Prediction from a measured gain plus the loss reached at ``pump_power``.

    The measured gain fixes the pump parameter; the induced-loss law sets the
    escape efficiency and the decay rate used for the detuning.
    """
    require_valid(opo)
    x = pump_parameter_from_gain(measured_gain)
    l2 = induced_loss(opo, pump_power)
    rho = escape_efficiency(opo.t2, l2)
    rates = cavity_rates(opo.t2, l2, opo.cavity_length, analysis_frequency)
    budget = total_detection_efficiency(chain, rho)
    return noise_variances(x, rates.detuning, budget.total)


def _check_mode(mode):
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")


def _operating_point(opo, pump_power, mode):
    # Pump parameter and intracavity loss for the chosen model variant.
    if mode == "ideal":
        return parametric_gain(pump_power, opo_threshold(opo)).pump_parameter, opo.l2_base
    return (gain_with_induced_loss(opo, pump_power).pump_parameter,
            induced_loss(opo, pump_power))


def squeeze_at(opo, chain, pump_power, analysis_frequency, mode="ideal"):
    """Squeezing at one pump power and sideband frequency."""
    _check_mode(mode)
    require_valid(opo)
    x, l2 = _operating_point(opo, pump_power, mode)
    rho = escape_efficiency(opo.t2, l2)
    rates = cavity_rates(opo.t2, l2, opo.cavity_length, analysis_frequency)
    return noise_variances(x, rates.detuning,
                           total_detection_efficiency(chain, rho).total)


def squeeze_power_sweep(opo, chain, p_min, p_max, steps, analysis_frequency,
                        mode="ideal"):
    """List of ``(pump_power, QuadratureNoise)`` on a uniform pump grid."""
    _check_mode(mode)
    return [(p, squeeze_at(opo, chain, p, analysis_frequency, mode))
            for p in linear_grid(p_min, p_max, steps)]


def frequency_spectrum(opo, chain, pump_power, f_min, f_max, steps,
                       log_spacing=False, mode="ideal"):
    """List of ``(frequency, QuadratureNoise)`` at a fixed pump power."""
    _check_mode(mode)
    require_valid(opo)
    if log_spacing:
        freqs = log_grid(f_min, f_max, steps)
    else:
        freqs = linear_grid(f_min, f_max, steps)
    x, l2 = _operating_point(opo, pump_power, mode)
    eta = total_detection_efficiency(chain, escape_efficiency(opo.t2, l2)).total
    rows = []
    for f in freqs:
        rates = cavity_rates(opo.t2, l2, opo.cavity_length, f)
        rows.append((f, noise_variances(x, rates.detuning, eta)))
    return rows
