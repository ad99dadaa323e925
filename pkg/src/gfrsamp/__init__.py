"""Sampling-set selection and reconstruction for graph fractional Fourier bandlimited signals."""

__version__ = "0.1.0"
