"""Exact Dirichlet-character arithmetic, L-function certification, and
class-group experiments for quadratic and pure cubic fields."""

__version__ = "0.1.0"
