"""Deciding Euclidean membership through Gaussian and Rademacher random projections."""

__version__ = "0.1.0"
