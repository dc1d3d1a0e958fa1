"""Exact arithmetic in Q(l) and linear algebra over it."""

from .linsolve import LinearSolution, solve_linear
from .ratfunc import (
    L,
    ONE,
    ZERO,
    PoleError,
    PolyL,
    RatFuncL,
    ScalarSyntaxError,
    as_ratfunc,
    format_ratfunc,
    parse_ratfunc,
    poly_coeffs,
    poly_from_coeffs,
    ratfunc_arith,
    specialize,
    to_fraction,
)

__all__ = [
    "L",
    "ONE",
    "ZERO",
    "LinearSolution",
    "PoleError",
    "PolyL",
    "RatFuncL",
    "ScalarSyntaxError",
    "as_ratfunc",
    "format_ratfunc",
    "parse_ratfunc",
    "poly_coeffs",
    "poly_from_coeffs",
    "ratfunc_arith",
    "solve_linear",
    "specialize",
    "to_fraction",
]
