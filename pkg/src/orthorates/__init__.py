"""Laguerre and Hermite expansions of singular functions: coefficients, rates and errors."""

__version__ = "0.1.0"
