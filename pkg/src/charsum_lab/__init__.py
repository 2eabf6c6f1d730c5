"""Numerical laboratory for incomplete character sums and their limiting processes."""

__version__ = "0.1.0"
