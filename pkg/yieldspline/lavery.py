"""L1-optimal C1 cubic spline on log-discount factors.

The slopes minimise a discretised ``integral |p''(u)| du`` over the whole
grid. On an interval with ``x = u - t_i`` the Hermite cubic has

    p''(x) = alpha(x) + beta(x) s_i + gamma(x) s_{i+1}

with ``alpha = 6d/h - 12 d x / h^2``, ``beta = -4/h + 6x/h^2`` and
``gamma = -2/h + 6x/h^2``, so sampling ``|p''|`` at ``M`` points per interval
and bounding each sample by an epigraph variable ``e >= |p''|`` gives a
linear program. The end slopes are pinned to the end secants, ``s_0 = d_0``
and ``s_n = d_{n-1}``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .curve import DateGrid, FloatArray, ZeroCurve
from .interpolation import (
    InterpolationError,
    Scheme,
    _check_values,
    as_grid,
    divided_differences,
    hermite_coefficients,
)
from .simplex import DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE, LinearProgram, Relation, simplex_solve

logger = logging.getLogger(__name__)

OBJECTIVE_CHECK_TOLERANCE = 1e-8


@dataclass(frozen=True)
class LaverySpec:
    """Discretisation and solver settings for the L1 spline."""
    samples_per_interval: int = 16
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if self.samples_per_interval < 2:
            raise InterpolationError(
                f"samples_per_interval must be at least 2, got {self.samples_per_interval}"
            )


def _sample_rows(h: float, d: float, m: int) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    """``alpha, beta, gamma`` at ``m`` uniform points and their trapezoid weights."""
    x = h * np.arange(m) / (m - 1)
    alpha = 6.0 * d / h - 12.0 * d * x / h**2
    beta = -4.0 / h + 6.0 * x / h**2
    gamma = -2.0 / h + 6.0 * x / h**2
    w = np.full(m, h / (m - 1))
    w[0] = w[-1] = 0.5 * h / (m - 1)
    return alpha, beta, gamma, w


def l1_objective(grid: DateGrid | ArrayLike, z: ArrayLike, s: ArrayLike, spec: LaverySpec | None = None) -> float:
    """Discretised ``integral |p''|`` of the Hermite cubic with slopes ``s``."""
    spec = spec or LaverySpec()
    grid = as_grid(grid)
    h, d = divided_differences(grid, z)
    ss = _check_values(grid, s, "slopes")
    total = 0.0
    for i in range(grid.n_intervals):
        alpha, beta, gamma, w = _sample_rows(h[i], d[i], spec.samples_per_interval)
        total += float(w @ np.abs(alpha + beta * ss[i] + gamma * ss[i + 1]))
    return total


def lavery_program(grid: DateGrid, z: ArrayLike, spec: LaverySpec) -> LinearProgram:
    """Epigraph LP over ``(s_0..s_n, e_11..e_nM)`` with the end slopes fixed to the end secants."""
    h, d = divided_differences(grid, z)
    n, m = grid.n_intervals, spec.samples_per_interval
    n_s = n + 1
    n_vars = n_s + n * m

    c = np.zeros(n_vars)
    a = np.zeros((2 * n * m + 2, n_vars))
    b = np.zeros(2 * n * m + 2)
    for i in range(n):
        alpha, beta, gamma, w = _sample_rows(h[i], d[i], m)
        cols = n_s + i * m + np.arange(m)
        c[cols] = w
        rows = 2 * (i * m + np.arange(m))
        # p'' - e <= 0
        a[rows, i] = beta
        a[rows, i + 1] = gamma
        a[rows, cols] = -1.0
        b[rows] = -alpha
        # -p'' - e <= 0
        a[rows + 1, i] = -beta
        a[rows + 1, i + 1] = -gamma
        a[rows + 1, cols] = -1.0
        b[rows + 1] = alpha

    # s_0 = d_0, s_n = d_{n-1}
    a[-2, 0] = 1.0
    b[-2] = d[0]
    a[-1, n] = 1.0
    b[-1] = d[-1]

    lower = np.concatenate((np.full(n_s, -np.inf), np.zeros(n * m)))
    return LinearProgram(
        objective=c,
        constraints=a,
        relations=(Relation.LE,) * (2 * n * m) + (Relation.EQ, Relation.EQ),
        rhs=b,
        lower=lower,
    )


def lavery_slopes(grid: DateGrid | ArrayLike, z: ArrayLike, spec: LaverySpec | None = None) -> FloatArray:
    """Slopes of the L1 spline.

    Raises:
        LinearProgramError: If the simplex solver fails (iteration limit carries diagnostics)
    """
    spec = spec or LaverySpec()
    grid = as_grid(grid)
    if len(grid) < 2:
        raise InterpolationError("The L1 spline needs at least two knots")
    zz = _check_values(grid, z)

    result = simplex_solve(lavery_program(grid, zz, spec), spec.max_iterations, spec.tolerance)
    s = result.x[: len(grid)]

    check = l1_objective(grid, zz, s, spec)
    if abs(check - result.objective) > OBJECTIVE_CHECK_TOLERANCE * max(1.0, abs(check)):
        logger.warning(
            f"L1 objective mismatch: solver {result.objective:.12g}, re-evaluated {check:.12g}"
        )
    logger.debug(
        f"L1 spline on {len(grid)} knots: objective {check:.6g}, "
        f"{result.phase1_iterations}+{result.phase2_iterations} pivots"
    )
    return s


def lavery_fit(
    times: ArrayLike, z: ArrayLike, spec: LaverySpec | None = None, valuation_date=None
) -> ZeroCurve:
    """Zero curve through ``(times, z)`` with L1 spline slopes."""
    grid = DateGrid(np.asarray(times, dtype=float), valuation_date)
    zz = np.asarray(z, dtype=float)
    s = lavery_slopes(grid, zz, spec)
    return ZeroCurve(grid=grid, z=zz, pp=hermite_coefficients(grid, zz, s), scheme=Scheme.LAVERY.value)
