"""Interpolation directly on instantaneous forwards.

Both schemes here are quadratic in the instantaneous forward on each
interval, pinned to node forwards ``f_{i-1}, f_i`` at the ends and to the
discrete forward ``f_i^d`` as interval mean. They differ in how the node
forwards are chosen:

- smart quadratic: Hagan-West node forwards (a local rule), C0 overall;
- area preserving: node forwards from derivative matching, C1 overall.

The first is the negated derivative of the Bessel cubic on ``z`` and the
second that of the natural C2 cubic on ``z``. The area-preserving bump
term is ``-3 (f_{i-1} + f_i - 2 f_i^d) x (1 - x)``; a plus sign in front of
``2 f_i^d`` would break the interval mean.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from datetime import date

import numpy as np
from numpy.typing import ArrayLike

from .curve import CurveError, DateGrid, FloatArray, ZeroCurve, _as_times, _result
from .interpolation import (
    InterpolationError,
    Scheme,
    TridiagonalSystem,
    as_grid,
    c2_natural_slopes,
    hermite_coefficients,
    tridiagonal_solve,
    with_origin,
)


@dataclass(frozen=True)
class ForwardSplineCurve:
    """Discrete forwards and node forwards on a grid, evaluated as a quadratic spline."""
    grid: DateGrid
    fd: FloatArray
    f: FloatArray
    kind: Scheme
    z0: float = 0.0

    def __post_init__(self):
        if not self.kind.is_forward_space:
            raise CurveError(f"Scheme '{self.kind.value}' is not a forward-space scheme")
        fd = np.array(self.fd, dtype=float)
        f = np.array(self.f, dtype=float)
        if len(fd) != self.grid.n_intervals:
            raise CurveError(f"Expected {self.grid.n_intervals} discrete forwards, got {len(fd)}")
        if len(f) != len(self.grid):
            raise CurveError(f"Expected {len(self.grid)} node forwards, got {len(f)}")
        fd.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "fd", fd)
        object.__setattr__(self, "f", f)
        z = np.concatenate(([self.z0], self.z0 - np.cumsum(fd * self.grid.spacing)))
        z.setflags(write=False)
        object.__setattr__(self, "_z", z)

    @property
    def valuation_date(self) -> date | None:
        return self.grid.valuation_date

    @property
    def z(self) -> FloatArray:
        """Log-discount values at the knots."""
        return self._z  # type: ignore[attr-defined]

    @property
    def scheme(self) -> str:
        return self.kind.value

    def _locate(self, t: FloatArray) -> tuple[np.ndarray, FloatArray, FloatArray]:
        times = self.grid.times
        i = np.clip(np.searchsorted(times, t, side="right") - 1, 0, self.grid.n_intervals - 1)
        h = times[i + 1] - times[i]
        return i, (t - times[i]) / h, h

    def _quadratic(self, i: np.ndarray) -> tuple[FloatArray, FloatArray, FloatArray]:
        """Coefficients of ``a + b x + c x^2`` on the intervals ``i``."""
        left, right, mean = self.f[i], self.f[i + 1], self.fd[i]
        bump = left + right - 2.0 * mean
        return left, right - left - 3.0 * bump, 3.0 * bump

    def log_discount(self, t: ArrayLike) -> float | FloatArray:
        """``z(t)`` by exact integration of the forward quadratic."""
        tt, scalar = _as_times(t)
        i, x, h = self._locate(tt)
        a, b, c = self._quadratic(i)
        xc = np.clip(x, 0.0, 1.0)
        out = self.z[i] - h * xc * (a + xc * (b / 2.0 + xc * c / 3.0))
        times = self.grid.times
        left = tt < times[0]
        right = tt > times[-1]
        out[left] = self.z[0] - self.f[0] * (tt[left] - times[0])
        out[right] = self.z[-1] - self.f[-1] * (tt[right] - times[-1])
        return _result(out, scalar)

    def discount(self, t: ArrayLike) -> float | FloatArray:
        tt, scalar = _as_times(t)
        return _result(np.exp(np.asarray(self.log_discount(tt))), scalar)

    def instantaneous_forward(self, t: ArrayLike) -> float | FloatArray:
        if self.kind is Scheme.SMART_QUADRATIC:
            return smart_quadratic_eval(self, t)
        return area_preserving_eval(self, t)

    def forward_curvature(self, t: ArrayLike) -> float | FloatArray:
        tt, scalar = _as_times(t)
        i, _, h = self._locate(tt)
        _, _, c = self._quadratic(i)
        out = 2.0 * c / h**2
        out[(tt < self.grid.times[0]) | (tt > self.grid.times[-1])] = 0.0
        return _result(out, scalar)


def _flat_outside(curve: ForwardSplineCurve, tt: FloatArray, out: FloatArray) -> FloatArray:
    out[tt < curve.grid.times[0]] = curve.f[0]
    out[tt > curve.grid.times[-1]] = curve.f[-1]
    return out


def _check_discrete(grid: DateGrid, fd: ArrayLike) -> FloatArray:
    arr = np.asarray(fd, dtype=float)
    if grid.n_intervals < 1:
        raise InterpolationError("Forward interpolation needs at least one interval")
    if arr.shape != (grid.n_intervals,):
        raise InterpolationError(f"Expected {grid.n_intervals} discrete forwards, got shape {arr.shape}")
    return arr


def hagan_node_forwards(grid: DateGrid | ArrayLike, fd: ArrayLike) -> FloatArray:
    """Hagan-West node forwards: spacing-weighted neighbours, extrapolated ends."""
    grid = as_grid(grid)
    fdd = _check_discrete(grid, fd)
    if grid.n_intervals == 1:
        return np.array([fdd[0], fdd[0]])

    h = grid.spacing
    f = np.empty(len(grid))
    f[1:-1] = (h[:-1] * fdd[1:] + h[1:] * fdd[:-1]) / (h[:-1] + h[1:])
    f[0] = fdd[0] - 0.5 * (f[1] - fdd[0])
    f[-1] = fdd[-1] - 0.5 * (f[-2] - fdd[-1])
    return f


def smart_quadratic_eval(curve: ForwardSplineCurve, t: ArrayLike) -> float | FloatArray:
    """Hagan-West quadratic ``g_i(x) + f_i^d``, flat beyond the grid."""
    if curve.kind is not Scheme.SMART_QUADRATIC:
        raise CurveError(f"Expected a smart-quadratic curve, got '{curve.kind.value}'")
    tt, scalar = _as_times(t)
    i, x, _ = curve._locate(tt)
    g0 = curve.f[i] - curve.fd[i]
    g1 = curve.f[i + 1] - curve.fd[i]
    out = g0 * (1.0 - 4.0 * x + 3.0 * x * x) + g1 * (-2.0 * x + 3.0 * x * x) + curve.fd[i]
    return _result(_flat_outside(curve, tt, out), scalar)


def area_preserving_system(h: FloatArray, fd: FloatArray) -> TridiagonalSystem:
    """First-derivative continuity of the forward, zero slope at both ends."""
    n = len(h) + 1
    sub = np.zeros(n)
    diag = np.zeros(n)
    sup = np.zeros(n)
    rhs = np.zeros(n)

    diag[0], sup[0], rhs[0] = 2.0, 1.0, 3.0 * fd[0]
    sub[1:-1] = h[1:]
    diag[1:-1] = 2.0 * (h[:-1] + h[1:])
    sup[1:-1] = h[:-1]
    rhs[1:-1] = 3.0 * (h[1:] * fd[:-1] + h[:-1] * fd[1:])
    sub[-1], diag[-1], rhs[-1] = 1.0, 2.0, 3.0 * fd[-1]
    return TridiagonalSystem(sub, diag, sup, rhs)


def area_preserving_node_forwards(grid: DateGrid | ArrayLike, fd: ArrayLike) -> FloatArray:
    """Node forwards making the area-preserving quadratic spline C1."""
    grid = as_grid(grid)
    fdd = _check_discrete(grid, fd)
    return tridiagonal_solve(area_preserving_system(grid.spacing, fdd))


def area_preserving_eval(curve: ForwardSplineCurve, t: ArrayLike) -> float | FloatArray:
    """``f_{i-1}(1-x) + f_i x - 3 (f_{i-1} + f_i - 2 f_i^d) x (1-x)``, flat beyond the grid."""
    if curve.kind is not Scheme.AREA_PRESERVING:
        raise CurveError(f"Expected an area-preserving curve, got '{curve.kind.value}'")
    tt, scalar = _as_times(t)
    i, x, _ = curve._locate(tt)
    left, right = curve.f[i], curve.f[i + 1]
    out = left * (1.0 - x) + right * x - 3.0 * (left + right - 2.0 * curve.fd[i]) * x * (1.0 - x)
    return _result(_flat_outside(curve, tt, out), scalar)


_NODE_RULES: dict[Scheme, Callable[[DateGrid, ArrayLike], FloatArray]] = {
    Scheme.SMART_QUADRATIC: hagan_node_forwards,
    Scheme.AREA_PRESERVING: area_preserving_node_forwards,
}


def forward_curve_from_discrete(
    grid: DateGrid | ArrayLike, fd: ArrayLike, kind: Scheme, z0: float = 0.0
) -> ForwardSplineCurve:
    grid = as_grid(grid)
    rule = _NODE_RULES.get(kind)
    if rule is None:
        raise InterpolationError(f"Scheme '{kind.value}' is not a forward-space scheme")
    fdd = _check_discrete(grid, fd)
    return ForwardSplineCurve(grid=grid, fd=fdd, f=rule(grid, fdd), kind=kind, z0=z0)


def forward_curve_from_zero_values(
    times: ArrayLike, z: ArrayLike, kind: Scheme, valuation_date: date | None = None
) -> ForwardSplineCurve:
    """Forward-space curve through log-discount knot values; ``t = 0`` is always a knot."""
    tt, zz = with_origin(times, z)
    grid = DateGrid(tt, valuation_date)
    fd = -np.diff(zz) / grid.spacing
    return forward_curve_from_discrete(grid, fd, kind, z0=float(zz[0]))


def as_zero_curve(curve: ForwardSplineCurve) -> ZeroCurve:
    """The equivalent cubic on ``z``: Bessel for smart quadratic, natural C2 for area preserving."""
    slopes = -np.asarray(curve.f)
    pp = hermite_coefficients(curve.grid, curve.z, slopes)
    scheme = Scheme.BESSEL if curve.kind is Scheme.SMART_QUADRATIC else Scheme.C2_NATURAL
    return ZeroCurve(grid=curve.grid, z=curve.z, pp=pp, scheme=scheme.value)


class Histopolant:
    """C1 quadratic matching given interval means (a histospline).

    Built as the derivative of the natural C2 cubic through the cumulative
    areas ``z_i = z_{i-1} + heights_i (t_i - t_{i-1})``.
    """

    def __init__(self, knots: ArrayLike, heights: ArrayLike):
        self.grid = as_grid(knots)
        hh = _check_discrete(self.grid, heights)
        self.heights = hh
        cumulative = np.concatenate(([0.0], np.cumsum(hh * self.grid.spacing)))
        self.pp = hermite_coefficients(
            self.grid, cumulative, c2_natural_slopes(self.grid, cumulative)
        )

    def __call__(self, t: ArrayLike) -> float | FloatArray:
        return self.pp.derivative(t, 1)


def histopolant(knots: ArrayLike, heights: ArrayLike) -> Histopolant:
    return Histopolant(knots, heights)
