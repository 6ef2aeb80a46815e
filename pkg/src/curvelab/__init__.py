"""Invariants of reduced plane curve singularities in exact arithmetic."""

__version__ = "0.1.0"
