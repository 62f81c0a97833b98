"""Exact, spectral and Monte Carlo diagnostics for weighted sign walks."""

__version__ = "0.1.0"

from .sequences import parse_spec, SequenceSpec  # noqa: F401
