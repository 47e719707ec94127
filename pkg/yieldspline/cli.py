"""CLI entry point for yieldspline."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .calibration import CalibrationError
from .commands import cmd_calibrate, cmd_equivalence_report, cmd_sample
from .config import Config, load_config
from .interpolation import Scheme
from .simplex import LinearProgramError

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger("yieldspline")

DEFAULT_CONFIG = Path("config.toml")

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_INPUT = 2


def add_common_args(parser: argparse.ArgumentParser, top_level: bool = False) -> None:
    """Add common arguments to a parser.

    Subcommand copies default to SUPPRESS so they do not overwrite options
    given before the subcommand name.
    """
    parser.add_argument(
        "-c", "--config",
        type=Path,
        default=None if top_level else argparse.SUPPRESS,
        help=f"Path to configuration file (default: {DEFAULT_CONFIG} if present)",
    )
    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        default=False if top_level else argparse.SUPPRESS,
        help="Enable debug logging",
    )


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with all subcommands."""
    parser = argparse.ArgumentParser(
        description="Yield curve interpolation, calibration and equivalence checks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    add_common_args(parser, top_level=True)
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # calibrate - Fit a curve to a quote file
    calibrate_parser = subparsers.add_parser("calibrate", help="Calibrate a curve to market quotes")
    add_common_args(calibrate_parser)
    calibrate_parser.add_argument("--quotes", type=Path, required=True, help="Quote CSV file")
    calibrate_parser.add_argument(
        "--scheme",
        choices=[s.value for s in Scheme],
        default=Scheme.C2_NATURAL.value,
        help="Interpolation scheme (default: c2)",
    )
    calibrate_parser.add_argument("--out", type=Path, required=True, help="Output curve CSV")

    # sample - Evaluate a calibrated curve on a grid
    sample_parser = subparsers.add_parser("sample", help="Sample a calibrated curve on a uniform grid")
    add_common_args(sample_parser)
    sample_parser.add_argument("--curve", type=Path, required=True, help="Curve CSV written by calibrate")
    sample_parser.add_argument("--from", dest="start", type=float, default=0.0, help="First time in years")
    sample_parser.add_argument("--to", dest="stop", type=float, required=True, help="Last time in years")
    sample_parser.add_argument("--step", type=float, default=1.0 / 365.0, help="Grid step in years")
    sample_parser.add_argument("--tenor", type=float, default=1.0 / 365.0, help="Tenor-forward length in years")
    sample_parser.add_argument("--out", type=Path, required=True, help="Output report CSV")

    # equivalence-report - Randomised scheme equivalence scans
    report_parser = subparsers.add_parser(
        "equivalence-report", help="Check forward-space schemes against their z-space splines"
    )
    add_common_args(report_parser)
    report_parser.add_argument("--quotes", type=Path, help="Also scan the curve calibrated to this file")
    report_parser.add_argument("--seed", type=int, help="Random seed (default from config, 42)")
    report_parser.add_argument("--points", type=int, help="Sample points per curve (default 10000)")

    return parser


def resolve_config(path: Path | None) -> Config:
    """Explicit path must exist; the default file is optional."""
    if path is not None:
        return load_config(path)
    if DEFAULT_CONFIG.exists():
        return load_config(DEFAULT_CONFIG)
    return Config()


def main(argv: list[str] | None = None) -> None:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    # Show help if no command specified
    if not args.command:
        parser.print_help()
        sys.exit(EXIT_OK)

    if getattr(args, "verbose", False):
        logging.getLogger("yieldspline").setLevel(logging.DEBUG)

    try:
        config = resolve_config(args.config)
        code = _run_command(args, config)
    except KeyboardInterrupt:
        logger.info("Interrupted")
        sys.exit(130)
    except (CalibrationError, LinearProgramError) as e:
        logger.error(f"Numeric failure: {e}")
        sys.exit(EXIT_NUMERIC)
    except FileNotFoundError as e:
        logger.error(f"File not found: {e.filename or e}")
        sys.exit(EXIT_INPUT)
    except ValueError as e:
        # quote files, configuration, dates and curve inputs
        logger.error(f"Invalid input: {e}")
        sys.exit(EXIT_INPUT)
    sys.exit(code)


def _run_command(args, config: Config) -> int:
    """Execute the requested command and return its exit status."""
    if args.command == "calibrate":
        return cmd_calibrate(config, args.quotes, Scheme(args.scheme), args.out)
    elif args.command == "sample":
        return cmd_sample(config, args.curve, args.start, args.stop, args.step, args.tenor, args.out)
    elif args.command == "equivalence-report":
        return cmd_equivalence_report(config, args.quotes, args.seed, args.points)
    raise ValueError(f"Unknown command '{args.command}'")


if __name__ == "__main__":
    main()
