"""Exact rational engine for finite fibered categories and their Kan extensions."""

__version__ = "0.1.0"
