"""Yieldspline - yield curve construction with equivalent forward and discount interpolations."""

__version__ = "0.1.0"
