"""Configuration management for yieldspline."""

import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)


@dataclass
class CalibrationConfig:
    """Levenberg-Marquardt settings and the repricing check."""
    tolerance: float = 1e-11
    step_tolerance: float = 1e-14
    max_iterations: int = 200
    initial_damping: float = 1e-3
    damping_decrease: float = 0.3
    damping_increase: float = 2.0
    fd_step: float = 1e-7
    reprice_tolerance: float = 1e-9
    allow_lavery: bool = False  # LP inside every residual: slow and non-smooth
    jacobian_workers: int = 1

    def __post_init__(self):
        for name in ("tolerance", "step_tolerance", "initial_damping", "fd_step", "reprice_tolerance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"calibration.{name} must be positive")
        if not 0 < self.damping_decrease < 1 < self.damping_increase:
            raise ValueError("calibration damping factors must satisfy 0 < decrease < 1 < increase")
        if self.max_iterations < 1:
            raise ValueError("calibration.max_iterations must be at least 1")
        if self.jacobian_workers < 1:
            raise ValueError("calibration.jacobian_workers must be at least 1")


@dataclass
class LaveryConfig:
    samples_per_interval: int = 16

    def __post_init__(self):
        if self.samples_per_interval < 2:
            raise ValueError("lavery.samples_per_interval must be at least 2")


@dataclass
class SimplexConfig:
    max_iterations: int = 10_000
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("simplex.tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("simplex.max_iterations must be at least 1")


@dataclass
class ReportConfig:
    """Randomized equivalence report.

    The seed can be overridden with the YIELDSPLINE_SEED environment variable.
    """
    seed: int = 42
    points: int = 10_000
    curves: int = 100
    threshold: float = 1e-11

    def __post_init__(self):
        env_seed = os.environ.get("YIELDSPLINE_SEED")
        if env_seed:
            try:
                self.seed = int(env_seed)
            except ValueError as e:
                raise ValueError(f"YIELDSPLINE_SEED must be an integer, got {env_seed!r}") from e
        if self.points < 2 or self.curves < 1:
            raise ValueError("report.points must be >= 2 and report.curves >= 1")
        if self.threshold <= 0:
            raise ValueError("report.threshold must be positive")


@dataclass
class OutputConfig:
    significant_digits: int = 12


@dataclass
class MarketConfig:
    spot_lag_days: int = 2  # business days from valuation to swap start


@dataclass
class Config:
    calibration: CalibrationConfig = field(default_factory=CalibrationConfig)
    lavery: LaveryConfig = field(default_factory=LaveryConfig)
    simplex: SimplexConfig = field(default_factory=SimplexConfig)
    report: ReportConfig = field(default_factory=ReportConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    market: MarketConfig = field(default_factory=MarketConfig)


def load_config(path: str | Path) -> Config:
    """Load configuration from a TOML file."""
    path = Path(path)
    with path.open("rb") as f:
        data = tomllib.load(f)

    cal_data = data.get("calibration", {})
    cal_config = CalibrationConfig(
        tolerance=cal_data.get("tolerance", 1e-11),
        step_tolerance=cal_data.get("step_tolerance", 1e-14),
        max_iterations=cal_data.get("max_iterations", 200),
        initial_damping=cal_data.get("initial_damping", 1e-3),
        damping_decrease=cal_data.get("damping_decrease", 0.3),
        damping_increase=cal_data.get("damping_increase", 2.0),
        fd_step=cal_data.get("fd_step", 1e-7),
        reprice_tolerance=cal_data.get("reprice_tolerance", 1e-9),
        allow_lavery=cal_data.get("allow_lavery", False),
        jacobian_workers=cal_data.get("jacobian_workers", 1),
    )

    lavery_data = data.get("lavery", {})
    lavery_config = LaveryConfig(
        samples_per_interval=lavery_data.get("samples_per_interval", 16),
    )

    simplex_data = data.get("simplex", {})
    simplex_config = SimplexConfig(
        max_iterations=simplex_data.get("max_iterations", 10_000),
        tolerance=simplex_data.get("tolerance", 1e-9),
    )

    report_data = data.get("report", {})
    report_config = ReportConfig(
        seed=report_data.get("seed", 42),
        points=report_data.get("points", 10_000),
        curves=report_data.get("curves", 100),
        threshold=report_data.get("threshold", 1e-11),
    )

    output_data = data.get("output", {})
    output_config = OutputConfig(
        significant_digits=output_data.get("significant_digits", 12),
    )

    market_data = data.get("market", {})
    market_config = MarketConfig(
        spot_lag_days=market_data.get("spot_lag_days", 2),
    )

    logger.debug(f"Loaded configuration from {path}")
    return Config(
        calibration=cal_config,
        lavery=lavery_config,
        simplex=simplex_config,
        report=report_config,
        output=output_config,
        market=market_config,
    )
