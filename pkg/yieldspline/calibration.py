"""Global calibration of a curve to market quotes.

The unknowns are the log-discount values at one knot per instrument (its
maturity, or its end date for futures) plus the fixed origin ``z(0) = 0``.
A Levenberg-Marquardt loop drives the rate-space residuals
``model_rate - par_rate`` to zero.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date

import numpy as np
from numpy.typing import ArrayLike

from .config import CalibrationConfig
from .curve import Curve, CurveError, FloatArray, year_fraction
from .forward import forward_curve_from_zero_values
from .instruments import InstrumentError, Quote, instrument_end, model_rate
from .interpolation import Scheme, build_zero_curve
from .lavery import LaverySpec

logger = logging.getLogger(__name__)

ResidualFn = Callable[[FloatArray], FloatArray]


class CalibrationError(Exception):
    """Calibration could not be set up or a residual could not be evaluated."""

    def __init__(self, message: str, quote_indices: Sequence[int] = ()):
        super().__init__(message)
        self.quote_indices = list(quote_indices)


def build_curve(
    times: ArrayLike,
    z: ArrayLike,
    scheme: Scheme,
    valuation_date: date | None = None,
    lavery_spec: LaverySpec | None = None,
) -> Curve:
    """Curve through log-discount knot values for any scheme; ``t = 0`` is added if missing."""
    if scheme.is_forward_space:
        return forward_curve_from_zero_values(times, z, scheme, valuation_date)
    return build_zero_curve(times, z, scheme, valuation_date, lavery_spec)


@dataclass(frozen=True)
class CalibrationProblem:
    quotes: tuple[Quote, ...]
    valuation_date: date
    scheme: Scheme = Scheme.C2_NATURAL
    lavery_spec: LaverySpec | None = None

    def __post_init__(self):
        if not self.quotes:
            raise CalibrationError("Calibration needs at least one quote")
        times = self.knot_times
        if times[0] <= 0.0 or np.any(np.diff(times) <= 0.0):
            raise CalibrationError("Quote end dates must be after valuation and strictly increasing")

    @property
    def knot_times(self) -> FloatArray:
        try:
            return np.array([
                year_fraction(self.valuation_date, instrument_end(q.instrument)) for q in self.quotes
            ])
        except CurveError as e:
            raise CalibrationError(str(e)) from e

    @property
    def market_rates(self) -> FloatArray:
        return np.array([q.par_rate for q in self.quotes])

    def curve(self, z_params: ArrayLike) -> Curve:
        return build_curve(self.knot_times, z_params, self.scheme, self.valuation_date, self.lavery_spec)


def residuals(z_params: ArrayLike, problem: CalibrationProblem) -> FloatArray:
    """Model minus market rate for every quote.

    Raises:
        CalibrationError: If a model rate is not finite; lists the offending quotes
    """
    z = np.asarray(z_params, dtype=float)
    if z.shape != (len(problem.quotes),):
        raise CalibrationError(f"Expected {len(problem.quotes)} parameters, got shape {z.shape}")
    curve = problem.curve(z)
    try:
        model = np.array([model_rate(curve, q.instrument) for q in problem.quotes])
    except InstrumentError as e:
        raise CalibrationError(f"Pricing failed: {e}") from e
    bad = np.flatnonzero(~np.isfinite(model))
    if len(bad):
        labels = ", ".join(problem.quotes[i].instrument.label or str(i) for i in bad)
        raise CalibrationError(f"Non-finite model rate for {labels}", bad.tolist())
    return model - problem.market_rates


@dataclass(frozen=True)
class LMOptions:
    tolerance: float = 1e-11
    step_tolerance: float = 1e-14
    max_iterations: int = 200
    initial_damping: float = 1e-3
    damping_decrease: float = 0.3
    damping_increase: float = 2.0
    fd_step: float = 1e-7
    jacobian_workers: int = 1

    @classmethod
    def from_config(cls, config: CalibrationConfig) -> LMOptions:
        return cls(
            tolerance=config.tolerance,
            step_tolerance=config.step_tolerance,
            max_iterations=config.max_iterations,
            initial_damping=config.initial_damping,
            damping_decrease=config.damping_decrease,
            damping_increase=config.damping_increase,
            fd_step=config.fd_step,
            jacobian_workers=config.jacobian_workers,
        )


@dataclass
class LMResult:
    x: FloatArray
    residuals: FloatArray
    iterations: int
    converged: bool
    message: str
    evaluations: int = 0
    damping_history: list[float] = field(default_factory=list)


def _jacobian(fn: ResidualFn, x: FloatArray, r: FloatArray, opts: LMOptions) -> FloatArray:
    """Forward-difference Jacobian, one residual evaluation per column."""
    steps = opts.fd_step * np.maximum(1.0, np.abs(x))

    def column(j: int) -> FloatArray:
        xp = x.copy()
        xp[j] += steps[j]
        return (fn(xp) - r) / steps[j]

    if opts.jacobian_workers > 1 and len(x) > 1:
        with ThreadPoolExecutor(max_workers=opts.jacobian_workers) as pool:
            cols = list(pool.map(column, range(len(x))))
    else:
        cols = [column(j) for j in range(len(x))]
    return np.column_stack(cols)


def levenberg_marquardt(fn: ResidualFn, x0: ArrayLike, opts: LMOptions | None = None) -> LMResult:
    """Minimise ``|fn(x)|^2`` with multiplicative damping on ``diag(J^T J)``.

    Stops when the largest residual is below ``tolerance``, when the step
    shrinks below ``step_tolerance`` or after ``max_iterations``.
    """
    opts = opts or LMOptions()
    x = np.array(x0, dtype=float)
    if not np.all(np.isfinite(x)):
        raise CalibrationError("Initial point must be finite")
    r = np.asarray(fn(x), dtype=float)
    evaluations = 1
    lam = opts.initial_damping
    history = [lam]
    cost = float(r @ r)

    for iteration in range(opts.max_iterations):
        if np.max(np.abs(r)) < opts.tolerance:
            return LMResult(x, r, iteration, True, "residuals below tolerance", evaluations, history)

        jac = _jacobian(fn, x, r, opts)
        evaluations += len(x)
        a = jac.T @ jac
        g = jac.T @ r
        scale = np.maximum(np.diag(a), np.finfo(float).tiny)

        try:
            step = np.linalg.solve(a + lam * np.diag(scale), -g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(a + lam * np.diag(scale), -g, rcond=None)[0]

        trial = x + step
        evaluations += 1
        try:
            r_trial = np.asarray(fn(trial), dtype=float)
        except CalibrationError as e:
            logger.debug(f"LM iteration {iteration + 1}: trial step rejected ({e})")
            r_trial = np.full_like(r, np.inf)
        trial_cost = float(r_trial @ r_trial)
        if np.all(np.isfinite(r_trial)) and trial_cost < cost:
            x, r, cost = trial, r_trial, trial_cost
            lam *= opts.damping_decrease
        else:
            lam *= opts.damping_increase
        history.append(lam)
        logger.debug(
            f"LM iteration {iteration + 1}: max residual {np.max(np.abs(r)):.3e}, "
            f"step {np.max(np.abs(step)):.3e}, damping {lam:.3e}"
        )

        if np.max(np.abs(step)) < opts.step_tolerance:
            converged = bool(np.max(np.abs(r)) < opts.tolerance)
            return LMResult(x, r, iteration + 1, converged, "step below tolerance", evaluations, history)

    converged = bool(np.max(np.abs(r)) < opts.tolerance)
    message = "residuals below tolerance" if converged else "iteration limit reached"
    return LMResult(x, r, opts.max_iterations, converged, message, evaluations, history)


@dataclass
class CalibrationResult:
    curve: Curve
    residuals: FloatArray
    iterations: int
    converged: bool
    message: str = ""

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residuals)))


def initial_guess(problem: CalibrationProblem, initial_rate: float | None = None) -> FloatArray:
    """Flat curve at ``initial_rate``, by default the first quote's rate."""
    rate = problem.quotes[0].par_rate if initial_rate is None else initial_rate
    return -rate * problem.knot_times


def calibrate(
    problem: CalibrationProblem,
    opts: LMOptions | None = None,
    initial_rate: float | None = None,
    allow_lavery: bool = False,
) -> CalibrationResult:
    """Solve for the knot log-discounts that reprice every quote.

    Non-convergence is reported through ``converged=False``.

    Raises:
        CalibrationError: For a Lavery scheme without ``allow_lavery`` or a failing residual
    """
    if problem.scheme is Scheme.LAVERY and not allow_lavery:
        raise CalibrationError("Calibrating the L1 spline is disabled; set calibration.allow_lavery")

    x0 = initial_guess(problem, initial_rate)
    logger.info(f"Calibrating {len(problem.quotes)} quotes with scheme '{problem.scheme.value}'")
    result = levenberg_marquardt(lambda z: residuals(z, problem), x0, opts)

    if result.converged:
        logger.info(
            f"Converged in {result.iterations} iterations, max residual {np.max(np.abs(result.residuals)):.3e}"
        )
    else:
        logger.warning(
            f"Calibration did not converge ({result.message}) after {result.iterations} iterations"
        )
    return CalibrationResult(
        curve=problem.curve(result.x),
        residuals=result.residuals,
        iterations=result.iterations,
        converged=result.converged,
        message=result.message,
    )
