"""Fluctuation identities for spectrally negative Levy processes killed at
matrix-exponential horizons."""

__version__ = "0.1.0"
