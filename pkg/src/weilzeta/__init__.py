"""Weil representations of finite quadratic modules, vector-valued Siegel Eisenstein
series of genus one and two, their diagonal pullback, Hecke operators and the
standard zeta function of vector-valued cusp forms."""

from .cyclotomic import CycloMatrix, CycloNum, e, format_cyclo
from .discriminant import (A2, A2_A2, D2_DIAG, E8, HYPERBOLIC, EvenLattice, FiniteQuadraticModule,
                           discriminant_form, read_gram, write_gram)
from .errors import WeilZetaError
from .weil import WeilRep, parse_word, weil_of

__version__ = "0.1.0"

__all__ = [
    "A2", "A2_A2", "D2_DIAG", "E8", "HYPERBOLIC", "CycloMatrix", "CycloNum", "EvenLattice",
    "FiniteQuadraticModule", "WeilRep", "WeilZetaError", "discriminant_form", "e",
    "format_cyclo", "parse_word", "read_gram", "weil_of", "write_gram",
]
