"""Randomised equivalence report between forward-space and z-space schemes."""

from __future__ import annotations

import logging
from pathlib import Path

from ..config import Config
from ..equivalence import run_equivalence_report
from ..interpolation import Scheme
from ..marketdata import knot_values
from .calibrate import calibrate_quotes, lavery_spec_from_config

logger = logging.getLogger("yieldspline")


def cmd_equivalence_report(
    config: Config,
    quotes_path: Path | None = None,
    seed: int | None = None,
    points: int | None = None,
) -> int:
    """Print one line per check; 0 iff every deviation is below the threshold."""
    seed = config.report.seed if seed is None else seed
    points = config.report.points if points is None else points

    extra = []
    if quotes_path is not None:
        _, result = calibrate_quotes(config, quotes_path, Scheme.C2_NATURAL)
        if not result.converged:
            logger.warning("Calibration of the quote file did not converge; scanning its knots anyway")
        extra.append(knot_values(result.curve))

    report = run_equivalence_report(
        seed=seed,
        curves=config.report.curves,
        points=points,
        threshold=config.report.threshold,
        extra=extra,
        lavery_spec=lavery_spec_from_config(config),
    )

    print(f"{'Check':<22} {'Max deviation':>14} {'Threshold':>10}  Result")
    print("-" * 56)
    for check in report.checks:
        status = "ok" if check.passed else "FAIL"
        print(f"{check.name:<22} {check.max_deviation:>14.3e} {check.threshold:>10.1e}  {status}")
    print(f"\nSeed {report.seed}, {config.report.curves + len(extra)} curves, {points} points per curve")

    if not report.passed:
        logger.error("Equivalence report failed")
        return 1
    return 0
