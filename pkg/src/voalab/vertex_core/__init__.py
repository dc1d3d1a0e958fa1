"""Normal forms and n-th products in freely generated vertex superalgebras."""

from .algfile import dump_algebra, load_algebra, loads_algebra, save_algebra
from .engine import Engine, check_presentation
from .fieldexpr import (
    FieldExpr,
    derivative,
    monomial_field,
    monomial_sort_key,
    normalize,
    nth_product,
    weight_basis,
    wick,
)
from .grammar import (
    ExpressionSyntaxError,
    UnknownNameError,
    format_field,
    format_monomial,
    parse_expression,
    parse_field,
)
from .modes import IndexPoly, ModeSum, falling_binomial, jacobi_modes, mode_bracket, reduce_derivatives
from .presentation import VACUUM, AlgebraPresentation, GeneratorInfo, PresentationError, tensor

__all__ = [
    "VACUUM",
    "AlgebraPresentation",
    "Engine",
    "ExpressionSyntaxError",
    "FieldExpr",
    "IndexPoly",
    "ModeSum",
    "falling_binomial",
    "jacobi_modes",
    "mode_bracket",
    "reduce_derivatives",
    "GeneratorInfo",
    "PresentationError",
    "UnknownNameError",
    "check_presentation",
    "derivative",
    "dump_algebra",
    "format_field",
    "format_monomial",
    "load_algebra",
    "loads_algebra",
    "monomial_field",
    "monomial_sort_key",
    "normalize",
    "nth_product",
    "parse_expression",
    "parse_field",
    "save_algebra",
    "tensor",
    "weight_basis",
    "wick",
]
