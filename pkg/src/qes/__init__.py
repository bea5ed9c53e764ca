"""Algebraic band edges and eigenfunctions of quasi-exactly-solvable elliptic potentials."""
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
