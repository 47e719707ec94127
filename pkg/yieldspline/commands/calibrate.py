"""Calibrate a curve to a quote file and write its knot table."""

from __future__ import annotations

import logging
from pathlib import Path

from ..calibration import CalibrationProblem, CalibrationResult, LMOptions, calibrate
from ..config import Config
from ..instruments import instrument_end, model_rate
from ..interpolation import Scheme
from ..lavery import LaverySpec
from ..marketdata import load_market_data, write_curve

logger = logging.getLogger("yieldspline")


def lavery_spec_from_config(config: Config) -> LaverySpec:
    return LaverySpec(
        samples_per_interval=config.lavery.samples_per_interval,
        max_iterations=config.simplex.max_iterations,
        tolerance=config.simplex.tolerance,
    )


def calibrate_quotes(
    config: Config, quotes_path: Path, scheme: Scheme
) -> tuple[CalibrationProblem, CalibrationResult]:
    """Load quotes and run the calibration with the configured solver settings."""
    market = load_market_data(quotes_path, spot_lag=config.market.spot_lag_days)
    problem = CalibrationProblem(
        quotes=tuple(market.quotes),
        valuation_date=market.valuation,
        scheme=scheme,
        lavery_spec=lavery_spec_from_config(config),
    )
    result = calibrate(
        problem,
        LMOptions.from_config(config.calibration),
        allow_lavery=config.calibration.allow_lavery,
    )
    return problem, result


def cmd_calibrate(config: Config, quotes_path: Path, scheme: Scheme, out_path: Path) -> int:
    """Calibrate, print the repricing table and write the curve; 1 on non-convergence."""
    problem, result = calibrate_quotes(config, quotes_path, scheme)

    print(f"{'Instrument':<12} {'End':<12} {'Market':>10} {'Model':>16} {'Error':>11}")
    print("-" * 65)
    for q, r in zip(problem.quotes, result.residuals, strict=True):
        label = q.instrument.label or type(q.instrument).__name__
        end = instrument_end(q.instrument).isoformat()
        model = model_rate(result.curve, q.instrument)
        print(f"{label:<12} {end:<12} {q.par_rate:>10.5f} {model:>16.12f} {r:>11.2e}")

    print(f"\nIterations: {result.iterations}")
    print(f"Max residual: {result.max_residual:.3e}")

    if not result.converged:
        logger.error(f"Calibration did not converge: {result.message}")
        return 1
    if result.max_residual > config.calibration.reprice_tolerance:
        logger.error(
            f"Max residual {result.max_residual:.3e} above {config.calibration.reprice_tolerance:.1e}"
        )
        return 1

    write_curve(out_path, result.curve, config.output.significant_digits)
    print(f"Curve written to {out_path}")
    return 0
