"""Cavity-enhanced second-harmonic generation.

The doubling efficiency ``eta = P_shg / P_in`` of a resonant doubler is the
solution of the implicit equation

    sqrt(eta) = 4 T1 sqrt(E_nl P_in)
                / [2 - sqrt(1 - T1) (2 - L1 - Gamma sqrt(eta P_in / E_nl))]**2

where ``sqrt(eta P_in / E_nl)`` is the circulating fundamental power and
``Gamma = E_nl + Gamma_abs`` collects conversion and UV absorption losses.
It is solved by bisection on ``g(eta) = RHS(eta)**2 - eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DomainError, NumericalFailure, Power, ShgParams, linear_grid, require_valid

ETA_UPPER = 1.0 - 1e-9
MAX_ITER = 200
# Bisection runs to relative machine precision in eta; this is tighter than
# 1e-12 absolute and keeps |sqrt(eta) - RHS| small when eta itself is tiny.
_REL_WIDTH = 4.0 * np.finfo(float).eps

STATUS_OK = 0
STATUS_NO_BRACKET = 1
STATUS_NOT_CONVERGED = 2


class NoRootBracketError(NumericalFailure):
    """``g`` has no sign change on the admissible efficiency interval."""

    def __init__(self, input_power, lower, upper, g_lower, g_upper):
        self.input_power = input_power
        self.bracket = (lower, upper)
        self.g_values = (g_lower, g_upper)
        super().__init__(
            f"no root of the doubling equation at P_in={input_power!r} W: "
            f"g({lower!r})={g_lower!r}, g({upper!r})={g_upper!r}"
        )


@dataclass(frozen=True)
class ShgOperatingPoint:
    input_power: float
    efficiency: float
    shg_power: float
    circulating_power: float
    absorbed_uv_power: float
    residual: float


def _rhs(eta, p, t1, l1, e_nl, gamma):
    pc = np.sqrt((eta * p) / e_nl)
    denom = 2.0 - np.sqrt(1.0 - t1) * (2.0 - l1 - gamma * pc)
    return 4.0 * t1 * np.sqrt(e_nl * p) / denom**2


def solve_efficiency(p, t1, l1, e_nl, gamma, max_iter=MAX_ITER):
    """Vectorised bisection for the doubling efficiency.

    All arguments broadcast against each other. Returns ``(eta, residual,
    status)`` arrays; ``status`` is one of the ``STATUS_*`` codes and
    ``eta`` is NaN wherever the status is not ``STATUS_OK``.
    """
    p, t1, l1, e_nl, gamma = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (p, t1, l1, e_nl, gamma))
    )

    def g(eta):
        return _rhs(eta, p, t1, l1, e_nl, gamma) ** 2 - eta

    lo = np.zeros(p.shape)
    hi = np.full(p.shape, ETA_UPPER)
    g_lo = g(lo)
    g_hi = g(hi)
    zero = p == 0.0
    bracketed = (g_lo > 0.0) & (g_hi < 0.0)
    active = bracketed & ~zero

    for _ in range(max_iter):
        active &= (hi - lo) > _REL_WIDTH * hi
        if not active.any():
            break
        mid = lo + 0.5 * (hi - lo)
        gm = g(mid)
        up = active & (gm > 0.0)
        down = active & ~(gm > 0.0)
        lo = np.where(up, mid, lo)
        hi = np.where(down, mid, hi)
    else:
        active &= (hi - lo) > _REL_WIDTH * hi

    eta = lo + 0.5 * (hi - lo)
    eta = np.where(zero, 0.0, eta)
    status = np.where(bracketed | zero, STATUS_OK, STATUS_NO_BRACKET)
    status = np.where(active, STATUS_NOT_CONVERGED, status)
    eta = np.where(status == STATUS_OK, eta, np.nan)
    residual = np.sqrt(eta) - _rhs(eta, p, t1, l1, e_nl, gamma)
    residual = np.where(zero, 0.0, residual)
    return eta, residual, status


def circulating_power(params, shg_power):
    """Intracavity fundamental power implied by a given SHG output."""
    shg_power = Power(shg_power)
    return math.sqrt(shg_power / params.e_nl)


def absorbed_uv_power(params, circulating):
    """UV power absorbed in the crystal, ``Gamma_abs * P_c**2``."""
    circulating = Power(circulating)
    return params.gamma_abs_ratio * params.e_nl * circulating**2


def _raise_for_status(params, p, status):
    if status == STATUS_NO_BRACKET:
        g_lo = float(_rhs(0.0, p, params.t1, params.l1, params.e_nl, params.gamma) ** 2)
        g_hi = float(
            _rhs(ETA_UPPER, p, params.t1, params.l1, params.e_nl, params.gamma) ** 2
            - ETA_UPPER
        )
        raise NoRootBracketError(p, 0.0, ETA_UPPER, g_lo, g_hi)
    if status == STATUS_NOT_CONVERGED:
        raise NumericalFailure(
            f"bisection did not converge in {MAX_ITER} iterations at P_in={p!r} W"
        )


def _operating_points(params, powers):
    # Solves all powers in one vectorised pass; elementwise arithmetic makes
    # each row identical to a pointwise solve.
    eta, residual, status = solve_efficiency(
        np.asarray(powers, dtype=float), params.t1, params.l1, params.e_nl, params.gamma
    )
    points = []
    for p, e, r, s in zip(powers, eta.tolist(), residual.tolist(), status.tolist()):
        if p == 0.0:
            points.append(ShgOperatingPoint(0.0, 0.0, 0.0, 0.0, 0.0, 0.0))
            continue
        _raise_for_status(params, p, s)
        shg = e * p
        pc = circulating_power(params, shg)
        points.append(ShgOperatingPoint(
            input_power=p,
            efficiency=e,
            shg_power=shg,
            circulating_power=pc,
            absorbed_uv_power=absorbed_uv_power(params, pc),
            residual=r,
        ))
    return points


def shg_efficiency(params: ShgParams, input_power) -> ShgOperatingPoint:
    """Solve the doubling equation at one input power (W).

    Raises
    ------
    NoRootBracketError
        If ``g`` does not change sign on ``[0, 1 - 1e-9]``.
    NumericalFailure
        If bisection hits the iteration cap.
    """
    require_valid(params)
    return _operating_points(params, [float(Power(input_power))])[0]


def shg_output_power(params, input_power):
    return shg_efficiency(params, input_power).shg_power


def small_signal_efficiency(params, input_power):
    """Low-power limit ``16 T1^2 E_nl P / B^4`` with ``B = 2 - sqrt(1-T1)(2-L1)``."""
    b = 2.0 - math.sqrt(1.0 - params.t1) * (2.0 - params.l1)
    return 16.0 * params.t1**2 * params.e_nl * float(input_power) / b**4


def normalized_conversion_efficiency(input_power, shg_power):
    """Return ``P_shg / P_in**2`` in 1/W."""
    p = Power(input_power)
    if p == 0.0:
        raise DomainError("normalized efficiency is undefined at zero input power")
    return float(Power(shg_power)) / float(p) ** 2


def shg_sweep(params, p_min, p_max, steps):
    """Operating points on a uniform input-power grid, endpoints included."""
    require_valid(params)
    return _operating_points(params, linear_grid(p_min, p_max, steps))
