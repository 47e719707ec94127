"""Randomised checks that forward-space schemes coincide with z-space splines.

Each check scans seeded random curves (3 to 20 knots, uneven spacing,
discrete forwards in [-2%, 8%]) and records the largest deviation relative
to the forward scale of the curve:

- smart quadratic forward against minus the Bessel cubic's derivative;
- area-preserving forward against minus the natural C2 cubic's derivative;
- histopolant against the area-preserving forward;
- the exact tenor-forward spline against the direct difference quotient,
  and its cubic coefficients on intervals where it must be quadratic;
- the interval mean of the instantaneous forward against the discrete
  forward, for every scheme.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from .calibration import build_curve
from .curve import FloatArray, ZeroCurve
from .forward import (
    area_preserving_eval,
    forward_curve_from_zero_values,
    histopolant,
    smart_quadratic_eval,
)
from .interpolation import Scheme, build_zero_curve
from .lavery import LaverySpec
from .tenor import tenor_curve_from_zero_curve

logger = logging.getLogger(__name__)

MIN_KNOTS = 3
MAX_KNOTS = 20
FORWARD_RANGE = (-0.02, 0.08)
QUADRATURE_NODES = 4


@dataclass
class CheckResult:
    name: str
    max_deviation: float
    threshold: float
    samples: int = 0

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation < self.threshold)


@dataclass
class EquivalenceReport:
    seed: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def random_curve(rng: np.random.Generator) -> tuple[FloatArray, FloatArray]:
    """Knot times starting at 0 and log-discount values of a random curve."""
    n = int(rng.integers(MIN_KNOTS, MAX_KNOTS + 1))
    h = rng.uniform(0.05, 5.0, size=n - 1)
    fd = rng.uniform(*FORWARD_RANGE, size=n - 1)
    times = np.concatenate(([0.0], np.cumsum(h)))
    z = np.concatenate(([0.0], -np.cumsum(fd * h)))
    return times, z


def _scale(times: FloatArray, z: FloatArray) -> float:
    fd = -np.diff(z) / np.diff(times)
    return max(float(np.max(np.abs(fd))), 1e-4)


def _sample_times(times: FloatArray, points: int) -> FloatArray:
    return np.linspace(times[0], times[-1], points)


def smart_quadratic_deviation(times: ArrayLike, z: ArrayLike, points: int) -> float:
    tt, zz = np.asarray(times, dtype=float), np.asarray(z, dtype=float)
    u = _sample_times(tt, points)
    fc = forward_curve_from_zero_values(tt, zz, Scheme.SMART_QUADRATIC)
    zc = build_zero_curve(tt, zz, Scheme.BESSEL)
    dev = np.asarray(smart_quadratic_eval(fc, u)) + np.asarray(zc.pp.derivative(u, 1))
    return float(np.max(np.abs(dev))) / _scale(tt, zz)


def area_preserving_deviation(times: ArrayLike, z: ArrayLike, points: int) -> float:
    tt, zz = np.asarray(times, dtype=float), np.asarray(z, dtype=float)
    u = _sample_times(tt, points)
    fc = forward_curve_from_zero_values(tt, zz, Scheme.AREA_PRESERVING)
    zc = build_zero_curve(tt, zz, Scheme.C2_NATURAL)
    dev = np.asarray(area_preserving_eval(fc, u)) + np.asarray(zc.pp.derivative(u, 1))
    return float(np.max(np.abs(dev))) / _scale(tt, zz)


def histospline_deviation(times: ArrayLike, z: ArrayLike, points: int) -> float:
    tt, zz = np.asarray(times, dtype=float), np.asarray(z, dtype=float)
    u = _sample_times(tt, points)
    fc = forward_curve_from_zero_values(tt, zz, Scheme.AREA_PRESERVING)
    hist = histopolant(tt, fc.fd)
    dev = np.asarray(hist(u)) - np.asarray(area_preserving_eval(fc, u))
    return float(np.max(np.abs(dev))) / _scale(tt, zz)


def tenor_deviations(curve: ZeroCurve, tenor: float, points: int) -> tuple[float, float]:
    """Deviation from the difference quotient, and the largest cubic term where it must vanish."""
    tc = tenor_curve_from_zero_curve(curve, tenor)
    times = curve.grid.times
    scale = _scale(times, np.asarray(curve.z))
    u = np.linspace(times[0], times[-1], points)
    direct = -(np.asarray(curve.pp(u + tenor)) - np.asarray(curve.pp(u))) / tenor
    diff_dev = float(np.max(np.abs(np.asarray(tc(u)) - direct))) / scale

    cubic = 0.0
    knots = tc.knots
    for j in range(len(knots) - 1):
        mid = 0.5 * (knots[j] + knots[j + 1])
        i = int(curve.pp.locate(mid))
        if times[i] <= knots[j] and knots[j + 1] <= times[i + 1] - tenor:
            h = knots[j + 1] - knots[j]
            cubic = max(cubic, abs(tc.pp.coeffs[j, 3]) * h**3 / scale)
    return diff_dev, cubic


def area_deviation(times: ArrayLike, z: ArrayLike, scheme: Scheme, lavery_spec: LaverySpec | None = None) -> float:
    """Largest gap between the quadrature mean of the forward and the discrete forward."""
    tt, zz = np.asarray(times, dtype=float), np.asarray(z, dtype=float)
    curve = build_curve(tt, zz, scheme, lavery_spec=lavery_spec)
    nodes, weights = np.polynomial.legendre.leggauss(QUADRATURE_NODES)
    h = np.diff(tt)
    fd = -np.diff(zz) / h
    worst = 0.0
    for i in range(len(h)):
        u = tt[i] + 0.5 * h[i] * (nodes + 1.0)
        mean = 0.5 * float(weights @ np.asarray(curve.instantaneous_forward(u)))
        worst = max(worst, abs(mean - fd[i]))
    return worst / _scale(tt, zz)


def run_equivalence_report(
    seed: int = 42,
    curves: int = 100,
    points: int = 10_000,
    threshold: float = 1e-11,
    extra: list[tuple[FloatArray, FloatArray]] | None = None,
    lavery_curves: int = 3,
    lavery_spec: LaverySpec | None = None,
) -> EquivalenceReport:
    """Run every scan on ``curves`` random curves plus any ``extra`` (times, z) pairs.

    The L1 spline enters the area check on the first ``lavery_curves``
    curves only, each of them being a linear program.
    """
    rng = np.random.default_rng(seed)
    cases = [random_curve(rng) for _ in range(curves)]
    cases.extend(extra or [])
    tenors = rng.uniform(0.05, 0.5, size=len(cases))

    worst: dict[str, float] = {
        "smart-quad~bessel": 0.0,
        "area-preserving~c2": 0.0,
        "histospline": 0.0,
        "tenor-difference": 0.0,
        "tenor-quadratic": 0.0,
        "area-preservation": 0.0,
    }
    for k, (times, z) in enumerate(cases):
        worst["smart-quad~bessel"] = max(worst["smart-quad~bessel"], smart_quadratic_deviation(times, z, points))
        worst["area-preserving~c2"] = max(worst["area-preserving~c2"], area_preserving_deviation(times, z, points))
        worst["histospline"] = max(worst["histospline"], histospline_deviation(times, z, points))

        diff_dev, cubic = tenor_deviations(build_zero_curve(times, z, Scheme.C2_NATURAL), float(tenors[k]), points)
        worst["tenor-difference"] = max(worst["tenor-difference"], diff_dev)
        worst["tenor-quadratic"] = max(worst["tenor-quadratic"], cubic)

        for scheme in Scheme:
            if scheme is Scheme.LAVERY and k >= lavery_curves:
                continue
            worst["area-preservation"] = max(worst["area-preservation"], area_deviation(times, z, scheme, lavery_spec))
        logger.debug(f"Curve {k}: {len(times)} knots scanned")

    report = EquivalenceReport(seed=seed)
    for name, value in worst.items():
        report.checks.append(CheckResult(name=name, max_deviation=value, threshold=threshold, samples=len(cases)))
    return report
