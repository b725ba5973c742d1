"""Sub-threshold OPO: threshold, parametric gain, and pump-induced losses."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    CONSTANTS,
    AboveThresholdError,
    DomainError,
    Fraction,
    OpoParams,
    Power,
    linear_grid,
    require_valid,
)


@dataclass(frozen=True)
class GainPoint:
    pump_power: float
    gain: float
    pump_parameter: float
    threshold_used: float


@dataclass(frozen=True)
class CavityRates:
    """Cavity decay rate (rad/s) and the normalised detuning ``2 pi f / gamma``."""

    decay_rate: float
    detuning: float
    analysis_frequency: float


def opo_threshold(params: OpoParams, l2_override=None) -> float:
    """Oscillation threshold ``(T2 + L2)**2 / (4 E_nl) / alpha`` in watts.

    ``l2_override`` replaces the cold-cavity loss ``params.l2_base``.
    """
    require_valid(params)
    if l2_override is None:
        l2 = params.l2_base
    else:
        l2 = float(Fraction(l2_override))
        if l2 >= 1.0:
            raise DomainError(f"intracavity loss must be < 1, got {l2!r}")
    return (params.t2 + l2) ** 2 / (4.0 * params.e_nl_opo) / params.alpha


def parametric_gain(pump_power, threshold) -> GainPoint:
    p = float(Power(pump_power))
    th = float(Power(threshold))
    if th <= 0.0:
        raise DomainError(f"threshold must be positive, got {threshold!r}")
    if p >= th:
        raise AboveThresholdError(p, th)
    x = math.sqrt(p / th)
    return GainPoint(pump_power=p, gain=1.0 / (1.0 - x) ** 2, pump_parameter=x,
                     threshold_used=th)


def pump_parameter_from_gain(gain):
    """Invert the gain law: ``x = 1 - 1/sqrt(G)``."""
    g = float(gain)
    if not math.isfinite(g) or g < 1.0:
        raise DomainError(f"gain must be finite and >= 1, got {gain!r}")
    return 1.0 - 1.0 / math.sqrt(g)


def induced_loss(params: OpoParams, pump_power):
    """Intracavity loss under UV illumination, linear in pump power (W)."""
    p = float(Power(pump_power))
    loss = params.loss_intercept + params.loss_slope * p
    if not 0.0 <= loss < 1.0:
        raise DomainError(f"induced loss {loss!r} at {p!r} W is unphysical")
    return loss


def loss_from_finesse(finesse):
    f = float(finesse)
    if not math.isfinite(f) or f <= 2.0 * math.pi:
        raise DomainError(f"finesse must exceed 2*pi, got {finesse!r}")
    return 2.0 * math.pi / f


def escape_efficiency(t2, l2):
    t2 = float(Fraction(t2))
    l2 = float(Fraction(l2))
    if t2 == 0.0:
        raise DomainError("escape efficiency is undefined for t2 = 0")
    return t2 / (t2 + l2)


def cavity_rates(t2, l2, cavity_length, analysis_frequency) -> CavityRates:
    """Decay rate ``c (T2 + L2) / l`` and detuning at frequency ``f`` (Hz)."""
    t2 = float(Fraction(t2))
    l2 = float(Fraction(l2))
    length = float(cavity_length)
    f = float(analysis_frequency)
    if not math.isfinite(length) or length <= 0:
        raise DomainError(f"cavity length must be positive, got {cavity_length!r}")
    if not math.isfinite(f) or f < 0:
        raise DomainError(f"analysis frequency must be >= 0, got {analysis_frequency!r}")
    if t2 + l2 == 0.0:
        raise DomainError("decay rate vanishes for a lossless cavity")
    gamma = CONSTANTS.speed_of_light * (t2 + l2) / length
    return CavityRates(decay_rate=gamma, detuning=2.0 * math.pi * f / gamma,
                       analysis_frequency=f)


def effective_threshold(params: OpoParams, pump_power):
    """Threshold recomputed with the loss reached at ``pump_power``."""
    return opo_threshold(params, induced_loss(params, pump_power))


def gain_with_induced_loss(params: OpoParams, pump_power) -> GainPoint:
    return parametric_gain(pump_power, effective_threshold(params, pump_power))


def gain_sweep(params: OpoParams, p_min, p_max, steps, corrected=False):
    if corrected:
        return [gain_with_induced_loss(params, p)
                for p in linear_grid(p_min, p_max, steps)]
    threshold = opo_threshold(params)
    return [parametric_gain(p, threshold) for p in linear_grid(p_min, p_max, steps)]
