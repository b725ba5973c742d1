"""Least-squares recovery of model parameters from measured series.

Three fits are provided:

* ``fit_loss_law`` -- straight line through (pump power, loss) data.
* ``fit_threshold`` -- OPO threshold from (pump power, gain) data.
* ``fit_shg_params`` -- ``e_nl`` and ``l1`` of the doubling cavity from
  (input power, efficiency) data, with ``t1`` and the absorption ratio held
  fixed.

All fits are deterministic: scans use fixed grids and the local searches
start from the best scan point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .model import ModelError
from .shg import STATUS_OK, solve_efficiency


class FitError(ModelError, ValueError):
    """The data cannot determine the requested parameters."""


@dataclass(frozen=True)
class DataSeries:
    """Ordered ``(abscissa, ordinate)`` rows with strictly increasing abscissae."""

    rows: tuple

    def __post_init__(self):
        rows = tuple((float(a), float(b)) for a, b in self.rows)
        for a, b in rows:
            if not (math.isfinite(a) and math.isfinite(b)):
                raise FitError(f"non-finite value in row ({a!r}, {b!r})")
        for (a0, _), (a1, _) in zip(rows, rows[1:]):
            if not a1 > a0:
                raise FitError(f"abscissae must be strictly increasing: {a0!r}, {a1!r}")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_arrays(cls, x, y):
        return cls(tuple(zip(x, y)))

    def __len__(self):
        return len(self.rows)

    @property
    def x(self):
        return np.array([r[0] for r in self.rows])

    @property
    def y(self):
        return np.array([r[1] for r in self.rows])


@dataclass(frozen=True)
class FitResult:
    parameters: dict = field(default_factory=dict)
    residual_norm: float = math.inf
    converged: bool = False
    evaluations: int = 0


def _rms(residuals):
    residuals = np.asarray(residuals, dtype=float)
    return float(math.sqrt(np.mean(residuals**2)))


def fit_loss_law(data: DataSeries) -> FitResult:
    """Ordinary least-squares line ``loss = intercept + slope * pump``."""
    if len(data) < 2:
        raise FitError(f"loss-law fit needs at least 2 rows, got {len(data)}")
    x, y = data.x, data.y
    # centred normal equations; exact on collinear input
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0.0:
        raise FitError("degenerate abscissae")
    slope = float(np.sum((x - xm) * (y - ym))) / sxx
    intercept = float(ym - slope * xm)
    return FitResult(
        parameters={"intercept": intercept, "slope": slope},
        residual_norm=_rms(y - (intercept + slope * x)),
        converged=True,
        evaluations=1,
    )


def _gain_model(p, p_th):
    return 1.0 / (1.0 - np.sqrt(p / p_th)) ** 2


def fit_threshold(data: DataSeries, upper_factor=100.0, scan_points=2001) -> FitResult:
    """Threshold minimising the squared gain residuals.

    The search covers ``(max(P), upper_factor * max(P)]``: a geometric scan
    locates the best cell, then a bounded scalar minimisation refines it
    within the neighbouring cells.
    """
    if len(data) < 1:
        raise FitError("threshold fit needs at least one row")
    p, g = data.x, data.y
    if np.any(p <= 0):
        raise FitError("pump powers must be positive")
    if not np.any(g > 1.0):
        raise FitError("no row has gain > 1; threshold is undetermined")

    if len(data) == 1:
        x = 1.0 - 1.0 / math.sqrt(g[0])
        p_th = float(p[0] / x**2)
        return FitResult({"p_th": p_th}, 0.0, True, 1)

    p_max = float(p.max())
    lower = p_max * (1.0 + 1e-9)
    upper = upper_factor * p_max

    def cost(p_th):
        return float(np.sum((g - _gain_model(p, p_th)) ** 2))

    grid = np.geomspace(lower, upper, scan_points)
    costs = np.array([cost(t) for t in grid])
    i = int(np.argmin(costs))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(cost, bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12 * grid[i], "maxiter": 500})
    evaluations = scan_points + int(res.nfev)
    if res.fun <= costs[i]:
        p_th, best = float(res.x), float(res.fun)
    else:
        p_th, best = float(grid[i]), float(costs[i])
    return FitResult(
        parameters={"p_th": p_th},
        residual_norm=math.sqrt(best / len(data)),
        converged=bool(res.success),
        evaluations=evaluations,
    )


def _shg_costs(p, eta, t1, gamma_abs_ratio, e_nl, l1):
    """Sum of squared efficiency residuals for arrays of trial parameters."""
    e_nl = np.asarray(e_nl, dtype=float)[..., None]
    l1 = np.asarray(l1, dtype=float)[..., None]
    model, _, status = solve_efficiency(p, t1, l1, e_nl, e_nl * (1.0 + gamma_abs_ratio))
    ssr = np.sum((model - eta) ** 2, axis=-1)
    return np.where(np.all(status == STATUS_OK, axis=-1), ssr, np.inf)


def fit_shg_params(data: DataSeries, t1, gamma_abs_ratio=0.0,
                   e_nl_bounds=(1e-4, 1.0), l1_bounds=(0.0, 0.2),
                   scan_shape=(41, 41), max_evaluations=4000) -> FitResult:
    """Fit ``e_nl`` and ``l1`` to measured doubling efficiencies.

    Parameters
    ----------
    data : DataSeries
        Rows of (input power in W, efficiency).
    t1 : float
        Input-coupler transmissivity, held fixed.
    gamma_abs_ratio : float
        Absorption coefficient in units of ``e_nl``, held fixed.
    e_nl_bounds, l1_bounds : tuple of float
        Search box. ``e_nl`` is scanned geometrically, ``l1`` linearly.
    scan_shape : tuple of int
        Size of the coarse scan that seeds the simplex.
    max_evaluations : int
        Cap on simplex cost evaluations.

    Returns
    -------
    FitResult
        ``parameters`` holds ``e_nl`` and ``l1``. Trial points where the
        doubling equation has no admissible root cost infinity.
    """
    if len(data) < 3:
        raise FitError(f"SHG fit needs at least 3 rows, got {len(data)}")
    p, eta = data.x, data.y
    if np.any(p <= 0):
        raise FitError("input powers must be positive")

    e_grid = np.geomspace(e_nl_bounds[0], e_nl_bounds[1], scan_shape[0])
    l_grid = np.linspace(l1_bounds[0], l1_bounds[1], scan_shape[1])
    E, L = np.meshgrid(e_grid, l_grid, indexing="ij")
    scan = _shg_costs(p, eta, t1, gamma_abs_ratio, E, L)
    if not np.isfinite(scan).any():
        raise FitError("the doubling equation has no solution anywhere in the search box")
    i, j = np.unravel_index(int(np.argmin(scan)), scan.shape)
    start = np.array([e_grid[i], l_grid[j]])
    scan_best = float(scan[i, j])

    def cost(v):
        return float(_shg_costs(p, eta, t1, gamma_abs_ratio, v[0], v[1]))

    # initial simplex spans one scan cell in each direction, clipped to the box
    de = e_grid[min(i + 1, len(e_grid) - 1)] - e_grid[max(i - 1, 0)]
    dl = l_grid[min(j + 1, len(l_grid) - 1)] - l_grid[max(j - 1, 0)]
    simplex = np.array([
        start,
        [min(start[0] + 0.5 * de, e_nl_bounds[1]), start[1]],
        [start[0], min(start[1] + 0.5 * dl, l1_bounds[1])],
    ])
    if simplex[1, 0] == start[0]:
        simplex[1, 0] = start[0] - 0.5 * de
    if simplex[2, 1] == start[1]:
        simplex[2, 1] = start[1] - 0.5 * dl
    res = minimize(
        cost, start, method="Nelder-Mead",
        bounds=[e_nl_bounds, l1_bounds],
        options={"initial_simplex": simplex, "xatol": 1e-10, "fatol": 1e-15,
                 "maxfev": max_evaluations},
    )
    if res.fun <= scan_best:
        best_x, best = res.x, float(res.fun)
    else:
        best_x, best = start, scan_best
    return FitResult(
        parameters={"e_nl": float(best_x[0]), "l1": float(best_x[1])},
        residual_norm=math.sqrt(best / len(data)),
        converged=bool(res.success) and math.isfinite(best),
        evaluations=int(scan.size + res.nfev),
    )
