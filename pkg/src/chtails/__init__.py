"""Numerical laboratory for decay and tail coefficients of Camassa-Holm solutions."""

__version__ = "0.1.0"
