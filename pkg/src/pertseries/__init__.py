"""Perturbation series, convergence radii and certified bounds for tri-diagonal families L + zB."""

__version__ = "0.1.0"
