"""Sample a calibrated curve on a uniform grid, with its tenor forward."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from ..config import Config
from ..curve import Curve, ZeroCurve, sample
from ..forward import ForwardSplineCurve, as_zero_curve
from ..marketdata import ReportRow, read_curve_file, write_report
from ..tenor import tenor_curve_from_zero_curve
from .calibrate import lavery_spec_from_config

logger = logging.getLogger("yieldspline")

ONE_DAY = 1.0 / 365.0


def sample_rows(curve: Curve, start: float, stop: float, step: float, tenor: float = ONE_DAY) -> list[ReportRow]:
    """Report rows on ``start, start + step, ..., <= stop``.

    ``one_day_forward`` and ``second_deriv`` come from the exact tenor-forward
    spline: its value and its second derivative in the start date.
    """
    if step <= 0 or stop < start:
        raise ValueError(f"Invalid sampling range from {start} to {stop} step {step}")
    zero_curve = as_zero_curve(curve) if isinstance(curve, ForwardSplineCurve) else curve
    if not isinstance(zero_curve, ZeroCurve):
        raise ValueError(f"Cannot build a tenor curve from {type(curve).__name__}")
    tenor_curve = tenor_curve_from_zero_curve(zero_curve, tenor)

    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    ts = start + step * np.arange(n)
    fbar = np.asarray(tenor_curve(ts))
    curvature = np.asarray(tenor_curve.curvature(ts))
    rows = []
    for t, fwd, second in zip(ts, fbar, curvature, strict=True):
        s = sample(curve, t)
        rows.append(ReportRow(
            t=s.t,
            discount=s.discount,
            zero=s.zero,
            inst_forward=s.inst_forward,
            one_day_forward=float(fwd),
            second_deriv=float(second),
        ))
    return rows


def cmd_sample(
    config: Config,
    curve_path: Path,
    start: float,
    stop: float,
    step: float,
    tenor: float,
    out_path: Path,
) -> int:
    curve = read_curve_file(curve_path, lavery_spec_from_config(config))
    rows = sample_rows(curve, start, stop, step, tenor)
    write_report(out_path, rows, config.output.significant_digits)
    print(f"Wrote {len(rows)} rows to {out_path}")
    return 0
