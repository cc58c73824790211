"""Angelesco multiple orthogonal polynomials near the touching point of two intervals."""

from .asymptotics import Cn_constant, cj_constant, lagrange_scaling_check, mh_compare, mh_rhs, pnn_zero_asymptotic
from .equilibrium import curve_constants, density, mass, phase_maps, potentials_and_constants, zeta_branches
from .errors import (
    AccuracyError,
    AngelescoError,
    BranchError,
    ConditioningError,
    DomainError,
    InvariantError,
    TrackingError,
    ValidationError,
)
from .modelrhp import Q_eval, Q_series_tau0, jump_residual, monodromy_residual, psi, q_j
from .mop import MultiIndex, Polynomial, classical_pnn, eval_scaled, poly_zeros, solve_mop
from .quadrature import gauss_jacobi_rule
from .weights import AnalyticFactor, ScalingParams, WeightParams, a_n, continue_weight, eval_weight

__all__ = [
    "AccuracyError",
    "AnalyticFactor",
    "AngelescoError",
    "BranchError",
    "Cn_constant",
    "ConditioningError",
    "DomainError",
    "InvariantError",
    "MultiIndex",
    "Polynomial",
    "Q_eval",
    "Q_series_tau0",
    "ScalingParams",
    "TrackingError",
    "ValidationError",
    "WeightParams",
    "a_n",
    "cj_constant",
    "classical_pnn",
    "continue_weight",
    "curve_constants",
    "density",
    "eval_scaled",
    "eval_weight",
    "gauss_jacobi_rule",
    "jump_residual",
    "lagrange_scaling_check",
    "mass",
    "mh_compare",
    "mh_rhs",
    "monodromy_residual",
    "phase_maps",
    "pnn_zero_asymptotic",
    "poly_zeros",
    "potentials_and_constants",
    "psi",
    "q_j",
    "solve_mop",
    "zeta_branches",
]
