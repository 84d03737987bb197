"""Type-checking kernel: core terms, normalization by evaluation, elaboration."""

from tcat.kernel.check import (
    Category, Context, Declaration, Elaborator, GlobalEnv, TypeCheckError,
    axiom_closure, check_declaration, check_declarations, normalize, to_raw,
)
from tcat.kernel.nbe import conv, evaluate, quote

__all__ = [
    "Category", "Context", "Declaration", "Elaborator", "GlobalEnv", "TypeCheckError",
    "axiom_closure", "check_declaration", "check_declarations", "conv", "evaluate",
    "normalize", "quote", "to_raw",
]
