"""Calculus on stationary and moving surfaces with numerical checks of
transport theorems and interface jump conditions."""

__version__ = "0.1.0"
