"""Exact vertex-algebra computations for W_{1+inf} and its free-field models."""

__version__ = "0.1.0"
