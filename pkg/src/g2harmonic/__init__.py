"""Representation-theoretic checks for harmonic analysis on the nearly parallel G2 sphere."""

__version__ = "0.1.0"
