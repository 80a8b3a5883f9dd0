"""Numerical verification of Jordan-algebraic quantum mechanics for the noncommutative Landau problem."""

from .claims import ClaimReport
from .fock import CompositeSpace, ModeSpec
from .landau import LandauParams, derive_frequencies

__all__ = ["ClaimReport", "CompositeSpace", "ModeSpec", "LandauParams", "derive_frequencies"]
__version__ = "0.1.0"
