"""Yieldspline test suite."""
