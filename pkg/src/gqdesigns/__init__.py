"""Generalized quadrangles, ovoids, and block designs with local resolution systems."""

__version__ = "0.1.0"
