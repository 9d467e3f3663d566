"""Stochastic p-Laplacian dynamics on weighted graphs with an Ornstein-Uhlenbeck drift."""

__version__ = "0.1.0"
