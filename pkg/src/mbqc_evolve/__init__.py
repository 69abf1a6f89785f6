"""Measurement-based Trotter evolution of fermionic chains on cluster states."""

__version__ = "0.1.0"
