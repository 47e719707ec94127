"""Constant-tenor discrete forwards and their link with log-discount splines.

For a fixed tenor ``delta`` the tenor forward is a function of the start
date: ``fbar(t) = -(z(t + delta) - z(t)) / delta``. If ``z`` is a cubic
spline on knots ``t_i``, ``fbar`` is a cubic spline whose breakpoints are
the ``t_i`` (through ``z(t)``) and the ``t_i - delta`` (through ``z(t + delta)``),
i.e. the end-date set ``{t_i} U {t_i + delta}`` moved back to start dates.
Between ``t_i`` and ``t_{i+1} - delta`` both ends use the same cubic, so
the tenor forward is exactly quadratic there.

The sign convention follows ``f^d(u, v) = -(ln P(v) - ln P(u)) / (v - u)``
so that tenor forwards are positive for positive rates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .curve import (
    CurveError,
    DateGrid,
    FloatArray,
    PiecewiseCubic,
    ZeroCurve,
    _as_times,
    _result,
    shift_polynomial,
)
from .interpolation import as_grid, c2_natural_slopes, hermite_coefficients

logger = logging.getLogger(__name__)

KNOT_TOLERANCE = 1e-12


def _dedupe(values: ArrayLike, tol: float = KNOT_TOLERANCE) -> FloatArray:
    ordered = np.sort(np.asarray(values, dtype=float))
    kept = [ordered[0]]
    for v in ordered[1:]:
        if v - kept[-1] > tol:
            kept.append(v)
    return np.array(kept)


def _check_tenor(tenor: float) -> None:
    if not tenor > 0.0:
        raise CurveError(f"Tenor must be positive, got {tenor!r}")


def augment_knots(grid: DateGrid | ArrayLike, tenor: float) -> DateGrid:
    """Sorted union of the knots and the knots shifted by ``tenor``."""
    _check_tenor(tenor)
    grid = as_grid(grid)
    union = _dedupe(np.concatenate((grid.times, grid.times + tenor)))
    return DateGrid(union, grid.valuation_date)


def start_date_knots(grid: DateGrid | ArrayLike, tenor: float) -> DateGrid:
    """Breakpoints of the tenor forward as a function of the start date.

    This is the augmented set of the grid shifted back by ``tenor``,
    restricted to ``t >= t_0``.
    """
    _check_tenor(tenor)
    grid = as_grid(grid)
    shifted = grid.times - tenor
    union = np.concatenate((grid.times, shifted[shifted > grid.times[0] + KNOT_TOLERANCE]))
    return DateGrid(_dedupe(union), grid.valuation_date)


@dataclass(frozen=True)
class TenorForwardCurve:
    """Tenor forward ``fbar(t) = f^d(t, t + tenor)`` keyed on start dates."""
    tenor: float
    knots: FloatArray
    pp: PiecewiseCubic

    def __post_init__(self):
        _check_tenor(self.tenor)

    def forward(self, t: ArrayLike) -> float | FloatArray:
        tt, scalar = _as_times(t)
        return _result(np.asarray(self.pp(tt)), scalar)

    def __call__(self, t: ArrayLike) -> float | FloatArray:
        return self.forward(t)

    def curvature(self, t: ArrayLike) -> float | FloatArray:
        """Second derivative of the tenor forward in the start date."""
        tt, scalar = _as_times(t)
        return _result(np.asarray(self.pp.derivative(tt, 2)), scalar)


def tenor_curve_from_zero_curve(curve: ZeroCurve, tenor: float) -> TenorForwardCurve:
    """Exact piecewise cubic representation of the tenor forward of a z-spline."""
    knots = start_date_knots(curve.grid, tenor).times
    coeffs = np.empty((len(knots) - 1, 4))
    for j in range(len(knots) - 1):
        start = knots[j]
        mid = 0.5 * (knots[j] + knots[j + 1])
        near = curve.pp.taylor(start, piece_at=mid)
        far = curve.pp.taylor(start + tenor, piece_at=mid + tenor)
        coeffs[j] = -(far - near) / tenor
    logger.debug(f"Tenor curve: {len(knots)} start-date knots for tenor {tenor:.6g}")
    return TenorForwardCurve(tenor=tenor, knots=knots, pp=PiecewiseCubic(knots, coeffs))


def tenor_spline(knots: ArrayLike, forwards: ArrayLike, tenor: float) -> TenorForwardCurve:
    """Natural C2 cubic spline directly on tenor forwards at start-date knots."""
    _check_tenor(tenor)
    grid = as_grid(knots)
    values = np.asarray(forwards, dtype=float)
    pp = hermite_coefficients(grid, values, c2_natural_slopes(grid, values))
    return TenorForwardCurve(tenor=tenor, knots=grid.times, pp=pp)


def _periods(t: float, tenor: float) -> tuple[int, float]:
    """Whole tenor periods in ``t`` and the remaining stub, tolerant to round-off."""
    k = int(np.floor(t / tenor + 1e-9))
    return k, max(t - k * tenor, 0.0)


def log_discount_by_summation(fc: TenorForwardCurve, t: float, extrapolation: str = "constant") -> float:
    """``p(t)`` from chaining tenor forwards back to a stub at the origin."""
    if extrapolation != "constant":
        raise CurveError(f"Unsupported extrapolation '{extrapolation}'")
    if t < 0.0:
        raise CurveError(f"Curve times must be non-negative, got {t!r}")
    k, stub = _periods(t, fc.tenor)
    value = -stub * float(fc(0.0))
    if k:
        starts = np.maximum(t - fc.tenor * np.arange(1, k + 1), 0.0)
        value -= fc.tenor * float(np.sum(fc(starts)))
    return value


def zero_curve_from_tenor_curve(
    fc: TenorForwardCurve, extrapolation: str = "constant", horizon: float | None = None
) -> PiecewiseCubic:
    """Rebuild the log-discount spline from a tenor forward curve.

    Works window by window: on ``[k delta, (k+1) delta)`` the log-discount
    piece is the previous window's piece minus ``delta`` times the tenor
    forward, both shifted by one tenor. The first window is the stub
    ``p(t) = -t fbar(0)`` of a constant extrapolation.
    """
    if extrapolation != "constant":
        raise CurveError(f"Unsupported extrapolation '{extrapolation}'")
    tenor = fc.tenor
    horizon = float(fc.knots[-1]) if horizon is None else float(horizon)
    n_windows = max(int(np.ceil(horizon / tenor - 1e-9)), 1)

    # pieces of the current window: (start, taylor coefficients at start)
    window: list[tuple[float, FloatArray]] = [(0.0, np.array([0.0, -float(fc(0.0)), 0.0, 0.0]))]
    starts: list[float] = [0.0]
    coeffs: list[FloatArray] = [window[0][1]]
    interior = np.asarray(fc.knots, dtype=float)

    for k in range(n_windows - 1):
        lo, hi = k * tenor, (k + 1) * tenor
        breaks = [s for s, _ in window]
        breaks.extend(interior[(interior > lo + KNOT_TOLERANCE) & (interior < hi - KNOT_TOLERANCE)])
        breaks = list(_dedupe(breaks))
        ends = breaks[1:] + [hi]

        piece_starts = np.array([s for s, _ in window])
        next_window: list[tuple[float, FloatArray]] = []
        for a, b in zip(breaks, ends, strict=True):
            if b - a <= KNOT_TOLERANCE:
                continue
            mid = 0.5 * (a + b)
            i = int(np.searchsorted(piece_starts, mid, side="right") - 1)
            s, c = window[i]
            shifted = shift_polynomial(c, a - s) - tenor * fc.pp.taylor(a, piece_at=mid)
            next_window.append((a + tenor, shifted))
        window = next_window
        for s, c in window:
            starts.append(s)
            coeffs.append(c)

    knots = np.array(starts + [n_windows * tenor])
    logger.debug(f"Rebuilt log-discount spline with {len(coeffs)} pieces over {n_windows} windows")
    return PiecewiseCubic(knots, np.array(coeffs))
