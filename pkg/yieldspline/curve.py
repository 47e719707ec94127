"""Curve representation and the discount / zero / forward accessor algebra.

A curve is described by its log-discount function ``z(t) = ln P(t)`` on
curve times measured in years (ACT/365-fixed from the valuation date).
Every accessor derives from ``z``:

    P(t) = exp(z(t))
    y(t) = -z(t) / t
    f(t) = -z'(t)
    f^d(u, v) = -(z(v) - z(u)) / (v - u)

Curves are immutable once built and may be read from several threads.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import date
from typing import Protocol, runtime_checkable

import numpy as np
from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger(__name__)

DAYS_PER_YEAR = 365

FloatArray = NDArray[np.float64]


class CurveError(ValueError):
    """Invalid curve input or evaluation request."""
    pass


def year_fraction(valuation: date, d: date) -> float:
    """ACT/365-fixed curve time of ``d`` seen from ``valuation``.

    Raises:
        CurveError: If ``d`` is before ``valuation``
    """
    days = (d - valuation).days
    if days < 0:
        raise CurveError(f"Date {d.isoformat()} is before valuation date {valuation.isoformat()}")
    return days / DAYS_PER_YEAR


def _as_times(t: ArrayLike) -> tuple[FloatArray, bool]:
    """Convert scalar-or-array input to a 1-d float array, remembering scalars."""
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if not np.all(np.isfinite(arr)):
        raise CurveError("Curve times must be finite")
    if np.any(arr < 0.0):
        raise CurveError(f"Curve times must be non-negative, got min {arr.min()!r}")
    return arr, scalar


def _result(values: FloatArray, scalar: bool) -> float | FloatArray:
    return float(values[0]) if scalar else values


@dataclass(frozen=True)
class DateGrid:
    """Strictly increasing curve knots in years, optionally tied to a valuation date."""
    times: FloatArray
    valuation_date: date | None = None

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        if times.ndim != 1 or len(times) == 0:
            raise CurveError("Grid needs a non-empty one-dimensional list of times")
        if not np.all(np.isfinite(times)):
            raise CurveError("Grid times must be finite")
        if times[0] < 0.0:
            raise CurveError(f"First grid time must be >= 0, got {times[0]!r}")
        if np.any(np.diff(times) <= 0.0):
            raise CurveError("Grid times must be strictly increasing")
        times.setflags(write=False)
        object.__setattr__(self, "times", times)

    @classmethod
    def from_dates(cls, valuation: date, dates: list[date]) -> DateGrid:
        return cls(np.array([year_fraction(valuation, d) for d in dates]), valuation)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def n_intervals(self) -> int:
        return len(self.times) - 1

    @property
    def spacing(self) -> FloatArray:
        return np.diff(self.times)


@dataclass(frozen=True)
class PiecewiseCubic:
    """Piecewise cubic in Hermite power form.

    On ``[knots[i], knots[i+1])`` the polynomial is
    ``c0 + c1 x + c2 x^2 + c3 x^3`` with ``x = t - knots[i]``. Outside
    ``[knots[0], knots[-1]]`` the function is extended linearly with the
    boundary slopes, so value and first derivative are continuous there.
    """
    knots: FloatArray
    coeffs: FloatArray

    def __post_init__(self):
        knots = np.array(self.knots, dtype=float)
        coeffs = np.array(self.coeffs, dtype=float).reshape(-1, 4)
        if len(knots) < 2:
            raise CurveError("Piecewise cubic needs at least two knots")
        if len(coeffs) != len(knots) - 1:
            raise CurveError(
                f"Expected {len(knots) - 1} coefficient rows, got {len(coeffs)}"
            )
        if np.any(np.diff(knots) <= 0.0):
            raise CurveError("Piecewise cubic knots must be strictly increasing")
        knots.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def start_value(self) -> float:
        return float(self.coeffs[0, 0])

    @property
    def start_slope(self) -> float:
        return float(self.coeffs[0, 1])

    @property
    def end_value(self) -> float:
        h = self.knots[-1] - self.knots[-2]
        c0, c1, c2, c3 = self.coeffs[-1]
        return float(c0 + h * (c1 + h * (c2 + h * c3)))

    @property
    def end_slope(self) -> float:
        h = self.knots[-1] - self.knots[-2]
        _, c1, c2, c3 = self.coeffs[-1]
        return float(c1 + h * (2.0 * c2 + 3.0 * h * c3))

    def locate(self, t: ArrayLike) -> NDArray[np.intp]:
        """Interval index for each time; ``knots[i]`` belongs to ``[knots[i], knots[i+1])``."""
        idx = np.searchsorted(self.knots, np.asarray(t, dtype=float), side="right") - 1
        return np.clip(idx, 0, len(self.coeffs) - 1)

    def derivative(self, t: ArrayLike, order: int = 0) -> float | FloatArray:
        """Evaluate the ``order``-th derivative (0..3), right limits at knots."""
        if order not in (0, 1, 2, 3):
            raise CurveError(f"Unsupported derivative order {order}")
        arr = np.asarray(t, dtype=float)
        scalar = arr.ndim == 0
        tt = np.atleast_1d(arr)

        idx = self.locate(tt)
        x = tt - self.knots[idx]
        c0, c1, c2, c3 = self.coeffs[idx].T
        if order == 0:
            out = c0 + x * (c1 + x * (c2 + x * c3))
        elif order == 1:
            out = c1 + x * (2.0 * c2 + 3.0 * x * c3)
        elif order == 2:
            out = 2.0 * c2 + 6.0 * x * c3
        else:
            out = 6.0 * c3

        left = tt < self.knots[0]
        right = tt > self.knots[-1]
        if np.any(left) or np.any(right):
            out = np.array(out, dtype=float)
            if order == 0:
                out[left] = self.start_value + self.start_slope * (tt[left] - self.knots[0])
                out[right] = self.end_value + self.end_slope * (tt[right] - self.knots[-1])
            elif order == 1:
                out[left] = self.start_slope
                out[right] = self.end_slope
            else:
                out[left | right] = 0.0
        return _result(np.asarray(out, dtype=float), scalar)

    def __call__(self, t: ArrayLike) -> float | FloatArray:
        return self.derivative(t, 0)

    def taylor(self, t: float, piece_at: float | None = None) -> FloatArray:
        """Taylor coefficients (value, slope, p''/2, p'''/6) at ``t``.

        The polynomial piece is the one containing ``piece_at`` (default
        ``t``), which lets callers pick a piece robustly when ``t`` sits
        on a knot up to round-off.
        """
        where = t if piece_at is None else piece_at
        if where < self.knots[0]:
            return np.array([self.start_value + self.start_slope * (t - self.knots[0]),
                             self.start_slope, 0.0, 0.0])
        if where > self.knots[-1]:
            return np.array([self.end_value + self.end_slope * (t - self.knots[-1]),
                             self.end_slope, 0.0, 0.0])
        i = int(self.locate(where))
        return shift_polynomial(self.coeffs[i], t - self.knots[i])


def shift_polynomial(coeffs: ArrayLike, dx: float) -> FloatArray:
    """Re-expand ``c0 + c1 x + c2 x^2 + c3 x^3`` around ``x = dx``."""
    c0, c1, c2, c3 = np.asarray(coeffs, dtype=float)
    return np.array([
        c0 + dx * (c1 + dx * (c2 + dx * c3)),
        c1 + dx * (2.0 * c2 + 3.0 * dx * c3),
        c2 + 3.0 * dx * c3,
        c3,
    ])


@runtime_checkable
class Curve(Protocol):
    """Anything that exposes a log-discount function and its derivatives."""

    @property
    def valuation_date(self) -> date | None:
        ...

    def log_discount(self, t: ArrayLike) -> float | FloatArray:
        ...

    def instantaneous_forward(self, t: ArrayLike) -> float | FloatArray:
        ...

    def forward_curvature(self, t: ArrayLike) -> float | FloatArray:
        """Second derivative of the instantaneous forward."""
        ...


@dataclass(frozen=True)
class ZeroCurve:
    """Log-discount values at knots plus their piecewise cubic interpolant."""
    grid: DateGrid
    z: FloatArray
    pp: PiecewiseCubic
    scheme: str

    def __post_init__(self):
        z = np.array(self.z, dtype=float)
        if len(z) != len(self.grid):
            raise CurveError(f"Expected {len(self.grid)} log-discount values, got {len(z)}")
        if self.grid.times[0] == 0.0 and z[0] != 0.0:
            raise CurveError(f"Log-discount at t=0 must be 0, got {z[0]!r}")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @property
    def valuation_date(self) -> date | None:
        return self.grid.valuation_date

    def log_discount(self, t: ArrayLike) -> float | FloatArray:
        tt, scalar = _as_times(t)
        return _result(np.asarray(self.pp(tt)), scalar)

    def discount(self, t: ArrayLike) -> float | FloatArray:
        tt, scalar = _as_times(t)
        return _result(np.exp(self.pp(tt)), scalar)

    def instantaneous_forward(self, t: ArrayLike) -> float | FloatArray:
        tt, scalar = _as_times(t)
        return _result(-np.asarray(self.pp.derivative(tt, 1)), scalar)

    def forward_curvature(self, t: ArrayLike) -> float | FloatArray:
        tt, scalar = _as_times(t)
        return _result(-np.asarray(self.pp.derivative(tt, 3)), scalar)


@dataclass(frozen=True)
class CurveSample:
    """All accessors of a curve evaluated at one time."""
    t: float
    discount: float
    zero: float
    inst_forward: float
    second_deriv_forward: float


def discount(curve: Curve, t: ArrayLike) -> float | FloatArray:
    """Discount factor ``P(t) = exp(z(t))``."""
    tt, scalar = _as_times(t)
    return _result(np.exp(np.asarray(curve.log_discount(tt))), scalar)


def instantaneous_forward(curve: Curve, t: ArrayLike) -> float | FloatArray:
    """Instantaneous forward ``-z'(t)``; right limit at knots, flat beyond the grid."""
    return curve.instantaneous_forward(t)


def zero_rate(curve: Curve, t: ArrayLike) -> float | FloatArray:
    """Continuously compounded zero rate; at ``t = 0`` this is ``f(0)``."""
    tt, scalar = _as_times(t)
    z = np.asarray(curve.log_discount(tt))
    positive = tt > 0.0
    out = np.asarray(curve.instantaneous_forward(tt), dtype=float).copy()
    out[positive] = -z[positive] / tt[positive]
    return _result(out, scalar)


def discrete_forward_cc(curve: Curve, u: float, v: float) -> float:
    """Continuously compounded forward over ``[u, v]``."""
    if not u < v:
        raise CurveError(f"Forward period start {u!r} must be before end {v!r}")
    zu, zv = np.asarray(curve.log_discount(np.array([u, v])))
    return float(-(zv - zu) / (v - u))


def discrete_forward_simple(curve: Curve, u: float, v: float, accrual: float) -> float:
    """Simply compounded forward ``(P(u)/P(v) - 1) / accrual``."""
    if not u < v:
        raise CurveError(f"Forward period start {u!r} must be before end {v!r}")
    if accrual <= 0.0:
        raise CurveError(f"Accrual must be positive, got {accrual!r}")
    zu, zv = np.asarray(curve.log_discount(np.array([u, v])))
    return float(np.expm1(zu - zv) / accrual)


def sample(curve: Curve, t: float) -> CurveSample:
    """Evaluate every accessor at ``t``."""
    return CurveSample(
        t=float(t),
        discount=float(discount(curve, t)),
        zero=float(zero_rate(curve, t)),
        inst_forward=float(curve.instantaneous_forward(t)),
        second_deriv_forward=float(curve.forward_curvature(t)),
    )
