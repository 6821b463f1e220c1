"""Chebyshev rational approximation (CRAM) of exp on the negative real axis.

Corrected partial-fraction coefficients for orders 14 and 16, tools to
verify them in extended precision, and the matrix-exponential action
exp(At) x0 built on them.
"""

__version__ = "0.1.0"

from .coeffs import CoefficientSet, builtin_set, load_set, save_set, truncate_set, validate_set
from .errcurve import equioscillation_report, make_grid, make_hybrid_grid, sample_error, sup_error
from .matexp import bateman_oracle, chain_matrix, cram_apply, hermitian_oracle
from .ratfun import eval_complex, eval_real
from .xprec import XComplex, xexp, xmake

__all__ = [
    "CoefficientSet",
    "XComplex",
    "bateman_oracle",
    "builtin_set",
    "chain_matrix",
    "cram_apply",
    "equioscillation_report",
    "eval_complex",
    "eval_real",
    "hermitian_oracle",
    "load_set",
    "make_grid",
    "make_hybrid_grid",
    "sample_error",
    "save_set",
    "sup_error",
    "truncate_set",
    "validate_set",
    "xexp",
    "xmake",
]
