"""Convergence polygons of p-adic differential equations, with Witt vector,
Artin-Hasse and Swan conductor calculators."""

__version__ = "0.1.0"
