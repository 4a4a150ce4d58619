"""Exact double (quasi-)Poisson calculus on quiver path algebras."""

from .core import (ARROW, DERIVATION, DIFFERENTIAL, INVERSE, VERTEX, Arrow,
                   Element, Quiver, QuiverError, Tensor, apply_permutation,
                   build_doubled_quiver, commutator, idem, letter,
                   localize_normal_form, multiply, necklace_normal_form,
                   perm_from_cycles, quiver, tensor)
from .parse import ParseError, parse_element, parse_expression, parse_tensor

__version__ = "0.1.0"

__all__ = [
    "ARROW", "DERIVATION", "DIFFERENTIAL", "INVERSE", "VERTEX", "Arrow", "Element",
    "ParseError", "Quiver", "QuiverError", "Tensor", "apply_permutation",
    "build_doubled_quiver", "commutator", "idem", "letter", "localize_normal_form",
    "multiply", "necklace_normal_form", "parse_element", "parse_expression",
    "parse_tensor", "perm_from_cycles", "quiver", "tensor",
]
