"""Numerical laboratory for quantum st-connectivity algorithms."""

__version__ = "0.1.0"
