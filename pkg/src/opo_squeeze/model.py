"""Shared constants, unit helpers, errors and parameter records.

All powers are in watts, all transmissivities and losses are fractions in
[0, 1] and all noise levels in dB use the power convention ``10*log10``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class PhysicalConstants:
    speed_of_light: float = 299792458.0  # m/s


CONSTANTS = PhysicalConstants()


class ModelError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ModelError, ValueError):
    """An input lies outside the domain where the model is defined."""


class AboveThresholdError(DomainError):
    """Pump power at or above the OPO oscillation threshold."""

    def __init__(self, pump_power, threshold):
        self.pump_power = pump_power
        self.threshold = threshold
        super().__init__(
            f"pump power {pump_power!r} W is at or above threshold {threshold!r} W"
        )


class NumericalFailure(ModelError, ArithmeticError):
    """A numerical procedure could not produce a valid answer."""


class Power(float):
    """Non-negative, finite power in watts."""

    def __new__(cls, value):
        v = float(value)
        if not math.isfinite(v):
            raise DomainError(f"power must be finite, got {value!r}")
        if v < 0:
            raise DomainError(f"power must be non-negative, got {value!r}")
        return super().__new__(cls, v)


class Fraction(float):
    """Dimensionless number in the closed interval [0, 1]."""

    def __new__(cls, value):
        v = float(value)
        if not math.isfinite(v):
            raise DomainError(f"fraction must be finite, got {value!r}")
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"fraction must lie in [0, 1], got {value!r}")
        return super().__new__(cls, v)


def db_from_linear(r):
    """Convert a variance ratio to decibels."""
    r = float(r)
    if not math.isfinite(r) or r <= 0:
        raise DomainError(f"linear ratio must be positive and finite, got {r!r}")
    return 10.0 * math.log10(r)


def linear_from_db(d):
    """Convert decibels back to a variance ratio."""
    d = float(d)
    if not math.isfinite(d):
        raise DomainError(f"dB value must be finite, got {d!r}")
    return 10.0 ** (d / 10.0)


def linear_grid(lo, hi, steps):
    """Uniform grid of ``steps`` points, both endpoints included exactly."""
    lo, hi = float(Power(lo)), float(Power(hi))
    if not lo < hi:
        raise DomainError(f"grid requires lo < hi, got {lo!r} >= {hi!r}")
    if isinstance(steps, bool) or int(steps) != steps or steps < 2:
        raise DomainError(f"steps must be an integer >= 2, got {steps!r}")
    grid = [float(v) for v in np.linspace(lo, hi, int(steps))]
    grid[0], grid[-1] = lo, hi
    return grid


def log_grid(lo, hi, steps):
    """Geometric grid; ``lo`` must be strictly positive."""
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not 0 < lo < hi:
        raise DomainError(f"log grid requires 0 < lo < hi, got {lo!r}, {hi!r}")
    if isinstance(steps, bool) or int(steps) != steps or steps < 2:
        raise DomainError(f"steps must be an integer >= 2, got {steps!r}")
    grid = [float(v) for v in np.geomspace(lo, hi, int(steps))]
    grid[0], grid[-1] = lo, hi
    return grid


@dataclass(frozen=True)
class ShgParams:
    """Doubling-cavity parameters.

    Attributes
    ----------
    t1 : float
        Input-coupler transmissivity.
    l1 : float
        Intracavity linear round-trip loss at the fundamental.
    e_nl : float
        Single-pass nonlinear conversion coefficient, 1/W.
    gamma_abs_ratio : float
        UV absorption coefficient in units of ``e_nl``.
    """

    t1: float
    l1: float
    e_nl: float
    gamma_abs_ratio: float = 0.0

    @property
    def gamma(self):
        """Total nonlinear loss coefficient, ``e_nl * (1 + gamma_abs_ratio)``."""
        return self.e_nl * (1.0 + self.gamma_abs_ratio)

    @property
    def gamma_abs(self):
        return self.gamma_abs_ratio * self.e_nl


@dataclass(frozen=True)
class OpoParams:
    """Sub-threshold OPO parameters.

    ``l2_base`` is the cold-cavity loss used by the ideal model;
    ``loss_intercept`` and ``loss_slope`` define the pump-induced loss law
    ``L2(P) = loss_intercept + loss_slope * P`` used by corrected quantities.
    ``cavity_length`` is the total round-trip length in meters.
    """

    t2: float
    l2_base: float
    e_nl_opo: float
    alpha: float
    cavity_length: float
    loss_intercept: float = 0.0
    loss_slope: float = 0.0


@dataclass(frozen=True)
class DetectionChain:
    quantum_efficiency: float
    visibility: float
    propagation: float


class Violation(NamedTuple):
    field: str
    value: object
    message: str

    def __str__(self):
        return f"{self.field}={self.value!r}: {self.message}"


def _check(violations, name, value, ok, message):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        violations.append(Violation(name, value, "must be a real number"))
    elif not math.isfinite(value):
        violations.append(Violation(name, value, "must be finite"))
    elif not ok(value):
        violations.append(Violation(name, value, message))


def validate(params):
    """Return the list of violated invariants; an empty list means valid.

    Violations are returned as data rather than raised, so that callers
    (config loading in particular) can report all of them at once.
    """
    v: list[Violation] = []
    if isinstance(params, ShgParams):
        _check(v, "t1", params.t1, lambda t: 0 < t < 1, "must satisfy 0 < t1 < 1")
        _check(v, "l1", params.l1, lambda t: 0 <= t < 1, "must satisfy 0 <= l1 < 1")
        _check(v, "e_nl", params.e_nl, lambda t: t > 0, "must be > 0")
        _check(v, "gamma_abs_ratio", params.gamma_abs_ratio, lambda t: t >= 0,
               "must be >= 0")
    elif isinstance(params, OpoParams):
        _check(v, "t2", params.t2, lambda t: 0 < t < 1, "must satisfy 0 < t2 < 1")
        _check(v, "l2_base", params.l2_base, lambda t: 0 <= t < 1,
               "must satisfy 0 <= l2_base < 1")
        _check(v, "e_nl_opo", params.e_nl_opo, lambda t: t > 0, "must be > 0")
        _check(v, "alpha", params.alpha, lambda t: 0 < t <= 1,
               "must satisfy 0 < alpha <= 1")
        _check(v, "cavity_length", params.cavity_length, lambda t: t > 0,
               "must be > 0")
        _check(v, "loss_intercept", params.loss_intercept, lambda t: 0 <= t < 1,
               "must satisfy 0 <= loss_intercept < 1")
        _check(v, "loss_slope", params.loss_slope, lambda t: t >= 0, "must be >= 0")
    elif isinstance(params, DetectionChain):
        for f in dataclasses.fields(params):
            _check(v, f.name, getattr(params, f.name), lambda t: 0 < t <= 1,
                   "must lie in (0, 1]")
    else:
        raise TypeError(f"cannot validate {type(params).__name__}")
    return v


def require_valid(params):
    violations = validate(params)
    if violations:
        joined = "; ".join(str(x) for x in violations)
        raise DomainError(f"invalid {type(params).__name__}: {joined}")
    return params


# Values reported for the 795 nm setup: doubling cavity, OPO, homodyne chain.
DEFAULT_SHG = ShgParams(t1=0.10, l1=0.015, e_nl=0.023, gamma_abs_ratio=0.22)
DEFAULT_OPO = OpoParams(
    t2=0.115,
    l2_base=0.004,
    e_nl_opo=0.0185,
    alpha=0.93,
    cavity_length=0.6,
    loss_intercept=0.00445,
    loss_slope=0.06767,
)
DEFAULT_DETECTION = DetectionChain(quantum_efficiency=0.94, visibility=0.997,
                                 propagation=0.99)
DEFAULT_ANALYSIS_FREQUENCY = 2e6  # Hz
