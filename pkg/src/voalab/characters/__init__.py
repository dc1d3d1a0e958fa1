"""Exact q-series, affine Weyl sums and the character identities of W_l."""

from .cyclotomic import Cyclo, root_of_unity, to_cyclo
from .formulas import (
    BPCalibration,
    CharacterReport,
    bp_central_charge,
    bp_character,
    bp_numerator,
    calibrate_bp,
    eta_product,
    eta_series,
    jacobi_theta,
    lattice_theta,
    orthogonality_kernel,
    singular_vector_count,
    universal_counts,
    verify_corollary,
    verify_decomposition,
    w_minimal_character,
    w_minimal_numerator,
)
from .lie import AffineWeight, coroot_vectors, fundamental_weight, reduced_length_sl2, rho, weyl_group
from .qseries import JacobiSeries, QSeries, euler_product

__all__ = [
    "AffineWeight",
    "BPCalibration",
    "CharacterReport",
    "Cyclo",
    "JacobiSeries",
    "QSeries",
    "bp_central_charge",
    "bp_character",
    "bp_numerator",
    "calibrate_bp",
    "coroot_vectors",
    "eta_product",
    "eta_series",
    "euler_product",
    "fundamental_weight",
    "jacobi_theta",
    "lattice_theta",
    "orthogonality_kernel",
    "reduced_length_sl2",
    "rho",
    "root_of_unity",
    "to_cyclo",
    "singular_vector_count",
    "universal_counts",
    "verify_corollary",
    "verify_decomposition",
    "w_minimal_character",
    "w_minimal_numerator",
    "weyl_group",
]
