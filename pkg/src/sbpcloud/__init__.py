"""Meshfree SBP differentiation operators on point clouds and a
numerical-flux solver for nonlinear conservation laws built on them."""

__version__ = "0.1.0"
