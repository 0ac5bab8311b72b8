"""Exact Hecke-ring arithmetic for Z^r and the Heisenberg Lie algebra."""

__version__ = "0.1.0"
