"""Recurrent next-slot power forecasting for 15-minute meter series."""

__version__ = "0.1.0"
