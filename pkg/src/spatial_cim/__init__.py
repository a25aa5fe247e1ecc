"""Numerical simulator of the all-optical spatial coherent Ising machine."""
__version__ = "0.1.0"
