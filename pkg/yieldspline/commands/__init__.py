"""Command implementations for the yieldspline CLI."""

from .calibrate import calibrate_quotes, cmd_calibrate, lavery_spec_from_config
from .report import cmd_equivalence_report
from .sample import cmd_sample, sample_rows

__all__ = [
    # calibrate
    "calibrate_quotes",
    "cmd_calibrate",
    "lavery_spec_from_config",
    # report
    "cmd_equivalence_report",
    # sample
    "cmd_sample",
    "sample_rows",
]
