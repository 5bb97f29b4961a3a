"""Sparse polynomials, the parser and the Groebner-basis engine."""
from .core import GREVLEX, LEX, MonomialOrder, Poly, RingMismatch, block_order
from .groebner import ResourceLimit, groebner, normal_form
from .ideal import (
    DimensionMismatch,
    Ideal,
    eliminate,
    fresh_name,
    ideal_equal,
    ideal_member,
    intersect,
    linear_variety_basis,
    radical_member,
    saturate,
    substitute_linear,
)
from .parse import PolySyntaxError, UnknownVariable, parse_poly

__all__ = [
    "GREVLEX",
    "LEX",
    "MonomialOrder",
    "Poly",
    "RingMismatch",
    "block_order",
    "ResourceLimit",
    "groebner",
    "normal_form",
    "DimensionMismatch",
    "Ideal",
    "eliminate",
    "fresh_name",
    "ideal_equal",
    "ideal_member",
    "intersect",
    "linear_variety_basis",
    "radical_member",
    "saturate",
    "substitute_linear",
    "PolySyntaxError",
    "UnknownVariable",
    "parse_poly",
]
