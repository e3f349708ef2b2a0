"""Hybrid k-factor GARMA / wavelet neural network forecasting toolkit."""

__version__ = "0.1.0"
