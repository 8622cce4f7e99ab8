"""Homology, periods and Mordell-Weil lattices of elliptic surfaces over P^1."""

__version__ = "0.1.0"
