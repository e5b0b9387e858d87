"""Monotone finite-difference schemes for Hamilton-Jacobi equations on the Wasserstein space of a graph."""

__version__ = "0.1.0"
