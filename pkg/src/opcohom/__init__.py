"""Exact cohomology of coloured operads, operadic modules and diagrams of algebras."""
from .linalg import BACKEND

__all__ = ["BACKEND"]
__version__ = "0.1.0"
