"""Lattice operator laboratory: spaces, operators, subspaces, verification."""

from .space import CHANNELS, RadialGrid, SectorSpace, full_multiplet, single_m
from .matrices import (
    OperatorMatrix,
    WSpec,
    alpha_rhat_matrix,
    beta_matrix,
    build_D,
    build_H,
    build_K,
    doubling_parity_matrix,
    eig_hermitian,
    field_strength,
    gamma5_matrix,
    j_ladder_matrix,
    j_z_matrix,
    max_entry,
    nonabelian_term,
    sigma_cross_reduction_residual,
    sigma_rhat_matrix,
    spectral_norm,
    w_inverse_square,
)
from .subspace import (
    BoundState,
    BoundSubspace,
    analytic_residual,
    bound_subspace,
    default_window,
    expected_window_count,
)
from .pseudospin import PseudoSpin, SO4Generators, build_pseudospin, build_so4
from .verify import DEFAULT_TOLERANCES, ReportEntry, SymmetryReport, VerifyConfig, verify_so4

__all__ = [
    "CHANNELS",
    "RadialGrid",
    "SectorSpace",
    "full_multiplet",
    "single_m",
    "OperatorMatrix",
    "WSpec",
    "alpha_rhat_matrix",
    "beta_matrix",
    "build_D",
    "build_H",
    "build_K",
    "doubling_parity_matrix",
    "eig_hermitian",
    "field_strength",
    "gamma5_matrix",
    "j_ladder_matrix",
    "j_z_matrix",
    "max_entry",
    "nonabelian_term",
    "sigma_cross_reduction_residual",
    "sigma_rhat_matrix",
    "spectral_norm",
    "w_inverse_square",
    "BoundState",
    "BoundSubspace",
    "analytic_residual",
    "bound_subspace",
    "default_window",
    "expected_window_count",
    "PseudoSpin",
    "SO4Generators",
    "build_pseudospin",
    "build_so4",
    "DEFAULT_TOLERANCES",
    "ReportEntry",
    "SymmetryReport",
    "VerifyConfig",
    "verify_so4",
]
