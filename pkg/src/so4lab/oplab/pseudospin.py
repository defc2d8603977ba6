"""Pseudo-spin doublet algebra and the hidden SO(4) generator assembly.

On the bound subspace each level carries an exact two-dimensional
representation: the K branches play the role of spin-up/down and the
normalized invariant tau_1 = D (D^2)^(-1/2) flips between them.  Zero-node
levels, where D^2 vanishes, are excluded before inversion.  Tensoring the
doublet algebra with the geometric j multiplet yields generators
I = J + T and R = J - T, both commuting with the restricted Hamiltonian.
I closes as an su(2); R transforms as a vector under I and its commutators
close back into I, the same pairing angular momentum makes with the
Runge-Lenz vector.  Together they span the SO(4) responsible for the
twofold degeneracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from ..angular import j_ladder_element
from .matrices import OperatorMatrix
from .space import SectorSpace
from .subspace import BoundSubspace

__all__ = ["PseudoSpin", "SO4Generators", "build_pseudospin", "build_so4", "multiplet_angular_momentum"]


def _one_m_restriction(op: OperatorMatrix) -> sp.csr_matrix:
    """Top-left m block of an operator that is block diagonal over m_j."""
    n4 = 4 * op.space.grid.n_points
    m = op.mat
    if sp.issparse(m):
        return m[:n4, :n4].tocsr()
    return sp.csr_matrix(np.asarray(m)[:n4, :n4])


@dataclass
class PseudoSpin:
    """Doublet basis and the tau / T matrices restricted to it.

    `basis` has orthonormal columns [psi_1, Dpsi_1-hat, psi_2, ...] on the
    single-m channel space; `tau` is (3, 2k, 2k) with tau_3 = K/(j+1/2)
    diagonal +-1 and tau_1 the normalized invariant; T = tau/2.
    """

    basis: np.ndarray
    energies: np.ndarray
    tau: np.ndarray
    kappa_abs: float
    d2_restricted: np.ndarray
    excluded_energies: tuple[float, ...]

    @property
    def T(self) -> np.ndarray:
        return 0.5 * self.tau

    @property
    def n_doublets(self) -> int:
        return self.basis.shape[1] // 2


def build_pseudospin(
    H: OperatorMatrix,
    K: OperatorMatrix,
    D: OperatorMatrix,
    subspace: BoundSubspace,
    d2_floor: float = 1e-8,
) -> PseudoSpin:
    """Assemble tau_1, tau_2, tau_3 on the admissible bound doublets.

    States with D^2 below the subspace ker-D threshold are excluded (and
    reported via `excluded_energies`); if an eigenvalue of the restricted
    D^2 still falls below `d2_floor` the inverse square root is refused.
    """
    d1 = _one_m_restriction(D)
    k1 = _one_m_restriction(K)
    basis, energies = subspace.doublet_basis(d1)
    if basis.shape[1] == 0:
        raise ValueError("no admissible doublets in the window")
    db = d1 @ basis
    d_r = basis.conj().T @ db
    d2_r = db.conj().T @ db
    w, u = np.linalg.eigh(d2_r)
    if float(w.min()) < d2_floor:
        raise ValueError(
            f"restricted D^2 has eigenvalue {w.min():.3e} below the floor {d2_floor:.1e}; "
            "a ker-D state slipped through exclusion"
        )
    inv_sqrt = (u * (1.0 / np.sqrt(w))[None, :]) @ u.conj().T
    tau1 = d_r @ inv_sqrt
    tau3 = (basis.conj().T @ (k1 @ basis)) / subspace.space.kappa_abs
    tau2 = 1j * tau1 @ tau3
    tau = np.stack([tau1, tau2, tau3])
    for i, t in enumerate(tau):
        herm = float(np.abs(t - t.conj().T).max())
        if herm > 1e-8:
            raise ValueError(f"tau_{i+1} not hermitian: defect {herm:.3e}")
    excluded = tuple(s.energy for s in subspace.excluded_ker_d())
    return PseudoSpin(
        basis=basis,
        energies=energies,
        tau=tau,
        kappa_abs=subspace.space.kappa_abs,
        d2_restricted=d2_r,
        excluded_energies=excluded,
    )


def multiplet_angular_momentum(j: float, m_list: tuple[float, ...]) -> np.ndarray:
    """Dense (3, n_m, n_m) matrices of J_x, J_y, J_z on the given m basis."""
    nm = len(m_list)
    jp = np.zeros((nm, nm), dtype=complex)
    for col, m in enumerate(m_list):
        el = j_ladder_element(j, m, "+")
        if el != 0.0:
            for row, mt in enumerate(m_list):
                if abs(mt - (m + 1.0)) < 1e-12:
                    jp[row, col] = el
    jm = jp.conj().T
    jz = np.diag(np.asarray(m_list, dtype=complex))
    return np.stack([(jp + jm) / 2.0, (jp - jm) / 2.0j, jz])


class SO4Generators(NamedTuple):
    """SO(4) generators I = J + T, R = J - T on multiplet x doublets."""

    I: np.ndarray  # (3, d, d)
    R: np.ndarray
    J: np.ndarray
    T: np.ndarray
    H_sub: np.ndarray
    energies: np.ndarray


def build_so4(space: SectorSpace, pseudo: PseudoSpin, ladder=None) -> SO4Generators:
    """Tensor the doublet T with the geometric J of the full multiplet.

    `ladder` may override the J_+- matrix elements (same call signature as
    `angular.j_ladder_element`); the default is the exact one.
    """
    if not space.is_full_multiplet:
        raise ValueError("full j multiplet required")
    if ladder is None:
        jmats = multiplet_angular_momentum(space.j, space.m_list)
    else:
        nm = space.n_m
        jp = np.zeros((nm, nm), dtype=complex)
        for col, m in enumerate(space.m_list):
            el = ladder(space.j, m, "+")
            for row, mt in enumerate(space.m_list):
                if abs(mt - (m + 1.0)) < 1e-12:
                    jp[row, col] = el
        jz = np.diag(np.asarray(space.m_list, dtype=complex))
        jmats = np.stack([(jp + jp.conj().T) / 2.0, (jp - jp.conj().T) / 2.0j, jz])
    nm = space.n_m
    two_k = pseudo.basis.shape[1]
    eye_m = np.eye(nm)
    eye_k = np.eye(two_k)
    J = np.stack([np.kron(jm, eye_k) for jm in jmats])
    T = np.stack([np.kron(eye_m, t) for t in pseudo.T])
    h_sub = np.kron(eye_m, np.diag(pseudo.energies.astype(complex)))
    return SO4Generators(I=J + T, R=J - T, J=J, T=T, H_sub=h_sub, energies=pseudo.energies)
