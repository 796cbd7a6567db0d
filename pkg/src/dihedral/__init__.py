"""Numerical toolkit for dihedral Maass forms on Gamma_0(q)."""

__version__ = "0.1.0"
