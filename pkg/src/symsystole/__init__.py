"""Systoles, symmetric systoles and symmetric ratios of symmetric starshaped hypersurfaces."""

__version__ = "0.1.0"
