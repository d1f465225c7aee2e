"""Finite-dimensional Wick calculus and the BV toy theory."""
from sigma_forge.wick_engine.bv import (
    BVOperators,
    DescentResult,
    SuperPoly,
    bv_operators,
    kinetic_action,
    scale_descent_check,
    spanning_set,
    square_zero_residual,
    vector_field_poly,
)
from sigma_forge.wick_engine.wick import (
    GaussianModel,
    Interaction,
    contract,
    effective_interaction,
    exp_contract,
    full_contraction_value,
    gauss_hermite_expectation,
    wick_expectation,
)

__all__ = [
    "BVOperators",
    "DescentResult",
    "GaussianModel",
    "Interaction",
    "SuperPoly",
    "bv_operators",
    "contract",
    "effective_interaction",
    "exp_contract",
    "full_contraction_value",
    "gauss_hermite_expectation",
    "kinetic_action",
    "scale_descent_check",
    "spanning_set",
    "square_zero_residual",
    "vector_field_poly",
    "wick_expectation",
]
