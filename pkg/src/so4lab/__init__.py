"""so4lab: a numerical laboratory for the relativistic hydrogen atom.

Exact Dirac-Coulomb spectra and radial functions, machine verification of
the hidden SO(4)-type symmetry generated by the spin-orbit operator K and
the anticommuting invariant D, monopolar and nonabelian extensions that
preserve the algebra, and a Lamb-type breaking term that destroys exactly
the invariant while conserving K and J.
"""

from .spectra import (
    DEFAULT_CONSTANTS,
    MonopoleQuantumNumbers,
    PhysicalConstants,
    QuantumNumbers,
    bohr_energy,
    degeneracy,
    depression,
    enumerate_states,
    monopolar_energy,
    monopolar_kappa,
    sommerfeld_energy,
    to_frequency,
)
from .angular import (
    AngularSector,
    TwoSpinorField,
    j_ladder_element,
    phi_A,
    phi_B,
    sigma_dot_L_eigenvalue,
    sigma_dot_rhat_residual,
    spherical_harmonic,
)
from .radial import (
    KummerParams,
    RadialMesh,
    RadialSolution,
    b_overlap,
    b_relation_residuals,
    build_solution,
    kummer,
    normalization,
    radial_mesh,
    verify_b_identity,
)
from .breaking import (
    LambParams,
    breaking_report,
    delta_coefficient,
    lamb_splitting_2s2p,
    lamb_term,
    perturbative_shift,
)
from . import oplab
from .oplab import (
    OperatorMatrix,
    RadialGrid,
    SectorSpace,
    SymmetryReport,
    VerifyConfig,
    bound_subspace,
    build_D,
    build_H,
    build_K,
    build_pseudospin,
    build_so4,
    eig_hermitian,
    verify_so4,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CONSTANTS",
    "MonopoleQuantumNumbers",
    "PhysicalConstants",
    "QuantumNumbers",
    "bohr_energy",
    "degeneracy",
    "depression",
    "enumerate_states",
    "monopolar_energy",
    "monopolar_kappa",
    "sommerfeld_energy",
    "to_frequency",
    "AngularSector",
    "TwoSpinorField",
    "j_ladder_element",
    "phi_A",
    "phi_B",
    "sigma_dot_L_eigenvalue",
    "sigma_dot_rhat_residual",
    "spherical_harmonic",
    "KummerParams",
    "RadialMesh",
    "RadialSolution",
    "b_overlap",
    "b_relation_residuals",
    "build_solution",
    "kummer",
    "normalization",
    "radial_mesh",
    "verify_b_identity",
    "LambParams",
    "breaking_report",
    "delta_coefficient",
    "lamb_splitting_2s2p",
    "lamb_term",
    "perturbative_shift",
    "oplab",
    "OperatorMatrix",
    "RadialGrid",
    "SectorSpace",
    "SymmetryReport",
    "VerifyConfig",
    "bound_subspace",
    "build_D",
    "build_H",
    "build_K",
    "build_pseudospin",
    "build_so4",
    "eig_hermitian",
    "verify_so4",
]
