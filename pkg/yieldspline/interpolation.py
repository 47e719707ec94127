"""Piecewise cubic interpolation of log-discount factors.

All schemes share the Hermite form: the cubic on ``[t_i, t_{i+1}]`` is fixed
by the knot values ``z_i`` and the knot slopes ``s_i``. A scheme is thus just
a rule for the slopes. With ``d_i = (z_{i+1} - z_i) / (t_{i+1} - t_i)`` we have
``d_i = -f^d_{i+1}``, and a slope ``s_i`` is minus the node forward ``f_i``.

Local schemes (Bessel, harmonic, limiters) set interior slopes from the two
adjacent divided differences and use natural end conditions. The C2 spline
solves a tridiagonal system. The Lavery L1 spline lives in ``lavery``.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike

from .curve import CurveError, DateGrid, FloatArray, PiecewiseCubic, ZeroCurve

logger = logging.getLogger(__name__)


class InterpolationError(CurveError):
    """Invalid interpolation input."""
    pass


class SingularSystemError(InterpolationError):
    """Zero pivot met while solving a tridiagonal system."""
    pass


class Scheme(Enum):
    """Interpolation schemes, named as on the command line."""
    BESSEL = "bessel"
    C2_NATURAL = "c2"
    SMART_QUADRATIC = "smart-quad"
    AREA_PRESERVING = "area-preserving"
    HARMONIC = "harmonic"
    RATIONAL_LIMITER = "rational"
    VAN_ALBADA = "van-albada"
    LAVERY = "lavery"

    @property
    def is_forward_space(self) -> bool:
        """Whether the scheme is defined on instantaneous forwards rather than on z."""
        return self in (Scheme.SMART_QUADRATIC, Scheme.AREA_PRESERVING)


def as_grid(grid: DateGrid | ArrayLike) -> DateGrid:
    if isinstance(grid, DateGrid):
        return grid
    try:
        return DateGrid(np.asarray(grid, dtype=float))
    except CurveError as e:
        raise InterpolationError(str(e)) from e


def _check_values(grid: DateGrid, values: ArrayLike, name: str = "values") -> FloatArray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (len(grid),):
        raise InterpolationError(f"Expected {len(grid)} {name}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InterpolationError(f"All {name} must be finite")
    return arr


def divided_differences(grid: DateGrid, z: ArrayLike) -> tuple[FloatArray, FloatArray]:
    """Interval lengths ``h_i`` and slopes ``d_i`` of the knot data."""
    zz = _check_values(grid, z)
    h = grid.spacing
    return h, np.diff(zz) / h


def hermite_coefficients(grid: DateGrid | ArrayLike, z: ArrayLike, s: ArrayLike) -> PiecewiseCubic:
    """Cubic Hermite interpolant of values ``z`` and slopes ``s``."""
    grid = as_grid(grid)
    if len(grid) < 2:
        raise InterpolationError("Hermite interpolation needs at least two knots")
    zz = _check_values(grid, z)
    ss = _check_values(grid, s, "slopes")
    h, d = divided_differences(grid, zz)

    coeffs = np.empty((grid.n_intervals, 4))
    coeffs[:, 0] = zz[:-1]
    coeffs[:, 1] = ss[:-1]
    coeffs[:, 2] = (3.0 * d - ss[1:] - 2.0 * ss[:-1]) / h
    coeffs[:, 3] = -(2.0 * d - ss[1:] - ss[:-1]) / h**2
    return PiecewiseCubic(grid.times, coeffs)


def natural_boundaries(d: FloatArray, s: FloatArray) -> FloatArray:
    """Fill ``s[0]`` and ``s[-1]`` so that ``p''`` vanishes at both ends."""
    s[0] = d[0] - 0.5 * (s[1] - d[0])
    s[-1] = d[-1] - 0.5 * (s[-2] - d[-1])
    return s


def _local_slopes(
    grid: DateGrid | ArrayLike,
    z: ArrayLike,
    node_forward: Callable[[FloatArray, FloatArray, FloatArray, FloatArray], FloatArray],
) -> FloatArray:
    """Slopes from a local rule on adjacent discrete forwards, natural ends.

    ``node_forward(fd_left, fd_right, h_left, h_right)`` returns the interior
    node forwards; the slope is its negative.
    """
    grid = as_grid(grid)
    if len(grid) < 2:
        raise InterpolationError("Slope schemes need at least two knots")
    h, d = divided_differences(grid, z)
    if grid.n_intervals == 1:
        return np.array([d[0], d[0]])

    s = np.empty(len(grid))
    fd = -d
    s[1:-1] = -node_forward(fd[:-1], fd[1:], h[:-1], h[1:])
    return natural_boundaries(d, s)


def bessel_slopes(grid: DateGrid | ArrayLike, z: ArrayLike) -> FloatArray:
    """Slopes of the parabola through three consecutive points."""
    def parabola(fd_left, fd_right, h_left, h_right):
        return (h_left * fd_right + h_right * fd_left) / (h_left + h_right)

    return _local_slopes(grid, z, parabola)


def harmonic_slopes(grid: DateGrid | ArrayLike, z: ArrayLike) -> FloatArray:
    """Weighted harmonic mean of adjacent discrete forwards.

    The harmonic mean is only applied when both neighbours share a strict
    sign; otherwise the node forward is zero.
    """
    def harmonic(fd_left, fd_right, h_left, h_right):
        span = 3.0 * (h_left + h_right)
        w_left = (h_left + 2.0 * h_right) / span
        w_right = (2.0 * h_left + h_right) / span
        same_sign = fd_left * fd_right > 0.0
        out = np.zeros_like(fd_left)
        a, b = fd_left[same_sign], fd_right[same_sign]
        out[same_sign] = 1.0 / (w_left[same_sign] / a + w_right[same_sign] / b)
        if not np.all(same_sign):
            logger.debug(f"Harmonic slopes: {np.count_nonzero(~same_sign)} node(s) set to zero")
        return out

    return _local_slopes(grid, z, harmonic)


def rational_limiter_slopes(grid: DateGrid | ArrayLike, z: ArrayLike) -> FloatArray:
    """Rational limiter on adjacent discrete forwards."""
    def rational(fd_left, fd_right, h_left, h_right):
        a, b = fd_left, fd_right
        num = 3.0 * b * a * (b + a)
        den = b * b + 4.0 * b * a + a * a
        return _limited(num, den, a, b)

    return _local_slopes(grid, z, rational)


def van_albada_slopes(grid: DateGrid | ArrayLike, z: ArrayLike) -> FloatArray:
    """Van Albada limiter on adjacent discrete forwards."""
    def van_albada(fd_left, fd_right, h_left, h_right):
        a, b = fd_left, fd_right
        num = b * b * a + b * a * a
        den = b * b + a * a
        return _limited(num, den, a, b)

    return _local_slopes(grid, z, van_albada)


def _limited(num: FloatArray, den: FloatArray, a: FloatArray, b: FloatArray) -> FloatArray:
    """``num / den`` where ``a`` and ``b`` share a strict sign, zero elsewhere.

    Both denominators are positive on that set.
    """
    out = np.zeros_like(num)
    ok = a * b > 0.0
    out[ok] = num[ok] / den[ok]
    if not np.all(ok):
        logger.debug(f"Limiter: {np.count_nonzero(~ok)} sign change(s), node forward set to zero")
    return out


@dataclass(frozen=True)
class TridiagonalSystem:
    """``sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]``.

    ``sub[0]`` and ``sup[-1]`` are ignored.
    """
    sub: FloatArray
    diag: FloatArray
    sup: FloatArray
    rhs: FloatArray

    def __post_init__(self):
        n = len(self.diag)
        for name in ("sub", "sup", "rhs"):
            if len(getattr(self, name)) != n:
                raise InterpolationError(f"Tridiagonal {name} must have length {n}")

    def __len__(self) -> int:
        return len(self.diag)

    def to_dense(self) -> FloatArray:
        n = len(self)
        a = np.diag(np.asarray(self.diag, dtype=float))
        if n > 1:
            a += np.diag(np.asarray(self.sub, dtype=float)[1:], -1)
            a += np.diag(np.asarray(self.sup, dtype=float)[:-1], 1)
        return a

    def matvec(self, x: ArrayLike) -> FloatArray:
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.diag, dtype=float) * x
        out[1:] += np.asarray(self.sub, dtype=float)[1:] * x[:-1]
        out[:-1] += np.asarray(self.sup, dtype=float)[:-1] * x[1:]
        return out


def tridiagonal_solve(system: TridiagonalSystem) -> FloatArray:
    """Thomas algorithm, no pivoting.

    Raises:
        SingularSystemError: If a pivot vanishes
    """
    n = len(system)
    sub = np.asarray(system.sub, dtype=float)
    diag = np.asarray(system.diag, dtype=float)
    sup = np.asarray(system.sup, dtype=float)
    rhs = np.asarray(system.rhs, dtype=float)

    gamma = np.zeros(n)
    beta = np.zeros(n)
    pivot = diag[0]
    if pivot == 0.0:
        raise SingularSystemError("Zero pivot in row 0")
    gamma[0] = sup[0] / pivot
    beta[0] = rhs[0] / pivot
    for i in range(1, n):
        pivot = diag[i] - sub[i] * gamma[i - 1]
        if pivot == 0.0:
            raise SingularSystemError(f"Zero pivot in row {i}")
        gamma[i] = sup[i] / pivot if i < n - 1 else 0.0
        beta[i] = (rhs[i] - sub[i] * beta[i - 1]) / pivot

    x = np.empty(n)
    x[-1] = beta[-1]
    for i in range(n - 2, -1, -1):
        x[i] = beta[i] - gamma[i] * x[i + 1]
    return x


def c2_system(h: FloatArray, d: FloatArray) -> TridiagonalSystem:
    """Second-derivative continuity with natural ends, in the knot slopes."""
    n = len(h) + 1
    sub = np.zeros(n)
    diag = np.zeros(n)
    sup = np.zeros(n)
    rhs = np.zeros(n)

    diag[0], sup[0], rhs[0] = 2.0, 1.0, 3.0 * d[0]
    sub[1:-1] = h[1:]
    diag[1:-1] = 2.0 * (h[:-1] + h[1:])
    sup[1:-1] = h[:-1]
    rhs[1:-1] = 3.0 * (h[1:] * d[:-1] + h[:-1] * d[1:])
    sub[-1], diag[-1], rhs[-1] = 1.0, 2.0, 3.0 * d[-1]
    return TridiagonalSystem(sub, diag, sup, rhs)


def c2_natural_slopes(grid: DateGrid | ArrayLike, z: ArrayLike) -> FloatArray:
    """Slopes of the natural cubic spline of class C2."""
    grid = as_grid(grid)
    if len(grid) < 2:
        raise InterpolationError("The C2 spline needs at least two knots")
    h, d = divided_differences(grid, z)
    return tridiagonal_solve(c2_system(h, d))


_SLOPE_RULES: dict[Scheme, Callable[[DateGrid, ArrayLike], FloatArray]] = {
    Scheme.BESSEL: bessel_slopes,
    Scheme.C2_NATURAL: c2_natural_slopes,
    Scheme.HARMONIC: harmonic_slopes,
    Scheme.RATIONAL_LIMITER: rational_limiter_slopes,
    Scheme.VAN_ALBADA: van_albada_slopes,
}


def slopes(scheme: Scheme, grid: DateGrid | ArrayLike, z: ArrayLike, lavery_spec=None) -> FloatArray:
    """Knot slopes for a log-discount scheme.

    Raises:
        InterpolationError: For forward-space schemes, which have no slope rule here
    """
    grid = as_grid(grid)
    if scheme is Scheme.LAVERY:
        from .lavery import LaverySpec, lavery_slopes

        return lavery_slopes(grid, z, lavery_spec or LaverySpec())
    rule = _SLOPE_RULES.get(scheme)
    if rule is None:
        raise InterpolationError(f"Scheme '{scheme.value}' is defined on forwards, not on slopes")
    return rule(grid, z)


def with_origin(times: ArrayLike, z: ArrayLike) -> tuple[FloatArray, FloatArray]:
    """Prepend ``t = 0, z = 0`` unless the grid already starts at zero."""
    tt = np.asarray(times, dtype=float)
    zz = np.asarray(z, dtype=float)
    if len(tt) != len(zz):
        raise InterpolationError(f"Got {len(tt)} times but {len(zz)} values")
    if len(tt) and tt[0] == 0.0:
        return tt, zz
    return np.concatenate(([0.0], tt)), np.concatenate(([0.0], zz))


def build_zero_curve(
    times: ArrayLike,
    z: ArrayLike,
    scheme: Scheme = Scheme.C2_NATURAL,
    valuation_date=None,
    lavery_spec=None,
) -> ZeroCurve:
    """Interpolate log-discount values with a slope scheme; ``t = 0`` is always a knot."""
    tt, zz = with_origin(times, z)
    grid = DateGrid(tt, valuation_date)
    s = slopes(scheme, grid, zz, lavery_spec)
    return ZeroCurve(grid=grid, z=zz, pp=hermite_coefficients(grid, zz, s), scheme=scheme.value)
