"""Exact numerical laboratory for spectral independence of the hardcore model."""

__version__ = "0.1.0"
