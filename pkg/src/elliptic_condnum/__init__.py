"""Condition numbers of real eigenvalues in the real elliptic Gaussian ensemble."""
from ._backend import BACKEND

__version__ = "0.1.0"
