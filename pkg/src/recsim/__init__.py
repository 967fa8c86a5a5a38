"""Desk-scale renewable energy community simulator and optimizer."""

__version__ = "0.1.0"
