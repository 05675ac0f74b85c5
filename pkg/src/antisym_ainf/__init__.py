"""Exact computations with gapped A∞ algebras over a truncated Novikov field."""

from .scalars import NovElem, TruncParams, nov_add, nov_mul, nov_norm
from .graded import FreeGCA, LinearMap, Space, gca_multiply, parity_involution, spe_sign
from .ainfinity import (
    GappedStructure, check_ainf, check_homomorphism, check_self_dual, compose,
    invert_diffeo, is_quasi_iso, kappa, nu, opposite, pullback, underlying_product,
)
from .hochschild import (
    HochschildCochain, epsilon, hoch_b, is_antisymmetric, pullback_iso, solve_primitive,
    t_map,
)
from .perturbation import RetractionData, build_minimal_model, derive_retraction
from .mc import check_gauge, deform, floer_rank, mc_residual
from .formality import (
    formality_run, obstruction_classes, obstruction_step, scramble, validate_antisymmetric,
)

__all__ = [
    "NovElem", "TruncParams", "nov_add", "nov_mul", "nov_norm",
    "FreeGCA", "LinearMap", "Space", "gca_multiply", "parity_involution", "spe_sign",
    "GappedStructure", "check_ainf", "check_homomorphism", "check_self_dual", "compose",
    "invert_diffeo", "is_quasi_iso", "kappa", "nu", "opposite", "pullback",
    "underlying_product",
    "HochschildCochain", "epsilon", "hoch_b", "is_antisymmetric", "pullback_iso",
    "solve_primitive", "t_map",
    "RetractionData", "build_minimal_model", "derive_retraction",
    "check_gauge", "deform", "floer_rank", "mc_residual",
    "formality_run", "obstruction_classes", "obstruction_step", "scramble",
    "validate_antisymmetric",
]

__version__ = "0.1.0"
