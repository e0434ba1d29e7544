"""Sublinear algorithms for minor-free graphs with exact reference oracles."""

__version__ = "0.1.0"
