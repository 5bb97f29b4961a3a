"""Exact decision procedures for orbit closures and commutative matrix groups."""
from .arith import CycloNum, Rat

__all__ = ["CycloNum", "Rat"]
__version__ = "0.1.0"
