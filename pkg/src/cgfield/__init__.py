"""Numerical verification toolkit for metric-field identities of gauge theories."""

__version__ = "0.1.0"
