"""Lattice operators of the four-channel radial problem.

Radial derivative: central antisymmetric stencil (f_{i+1} - f_{i-1})/2h
with Dirichlet closure (ghost zeros) at both ends.  Antisymmetry of the
stencil plus diagonality of every multiplication operator make the
algebraic identities among H, K, D and the involutions hold exactly on
the lattice, not just up to discretization error; the only discretization
error lives in the eigenvalues themselves.

Natural units M = hbar = c = 1.  Channel order (uA, uB, lA, lB) as in
`space.CHANNELS`.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh as _dense_eigh

from ..spectra import DEFAULT_CONSTANTS, PhysicalConstants
from .space import CHANNELS, SectorSpace

__all__ = [
    "PAULI",
    "SIGMA4",
    "ALPHA4",
    "BETA4",
    "GAMMA5_4",
    "OperatorMatrix",
    "build_H",
    "build_K",
    "build_D",
    "beta_matrix",
    "gamma5_matrix",
    "sigma_rhat_matrix",
    "alpha_rhat_matrix",
    "j_z_matrix",
    "j_ladder_matrix",
    "doubling_parity_matrix",
    "WSpec",
    "w_inverse_square",
    "nonabelian_term",
    "sigma_cross_reduction_residual",
    "field_strength",
    "eig_hermitian",
    "spectral_norm",
    "max_entry",
]

PAULI = np.array(
    [
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0j], [1.0j, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ],
    dtype=complex,
)

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)

SIGMA4 = np.array([np.block([[s, _Z2], [_Z2, s]]) for s in PAULI])
ALPHA4 = np.array([np.block([[_Z2, s], [s, _Z2]]) for s in PAULI])
BETA4 = np.block([[_I2, _Z2], [_Z2, -_I2]])
GAMMA5_4 = np.block([[_Z2, _I2], [_I2, _Z2]])


@dataclass
class OperatorMatrix:
    """A linear operator on a SectorSpace, stored sparse (or dense).

    When `hermitian` is set the constructor verifies the max-entry
    deviation from the adjoint is below 1e-13 and raises otherwise.
    `meta` carries whatever is needed to rebuild the per-K-branch dense
    blocks (coupling constants, extra diagonals) without touching the
    assembled full-space matrix.
    """

    mat: object
    space: SectorSpace
    hermitian: bool = True
    label: str = ""
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.mat.shape[0]
        if self.mat.shape != (n, n) or n != self.space.dim:
            raise ValueError(
                f"matrix shape {self.mat.shape} does not match space dim {self.space.dim}"
            )
        if self.hermitian:
            err = self.adjoint_defect()
            if err > 1e-13:
                raise ValueError(
                    f"operator '{self.label}' flagged hermitian but ||A - A^H||_max = {err:.3e}"
                )

    def adjoint_defect(self) -> float:
        if sp.issparse(self.mat):
            d = (self.mat - self.mat.getH()).tocoo()
            return float(np.abs(d.data).max()) if d.nnz else 0.0
        return float(np.abs(self.mat - self.mat.conj().T).max())

    def dense(self) -> np.ndarray:
        m = self.mat.toarray() if sp.issparse(self.mat) else np.asarray(self.mat)
        return np.ascontiguousarray(m, dtype=complex)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.mat @ v


def _deriv_matrix(grid) -> sp.csr_matrix:
    n = grid.n_points
    c = 0.5 / grid.h
    return sp.diags([np.full(n - 1, c), np.full(n - 1, -c)], [1, -1], format="csr")


def _channel_permutation(space: SectorSpace, entries: dict[tuple[str, str], complex]) -> sp.csr_matrix:
    """Channel-pattern matrix tensored with identity on radius and m_j."""
    n = space.grid.n_points
    pat = np.zeros((4, 4), dtype=complex)
    for (row, col), v in entries.items():
        pat[CHANNELS.index(row), CHANNELS.index(col)] = v
    one_m = sp.kron(sp.csr_matrix(pat), sp.identity(n, format="csr"), format="csr")
    return sp.block_diag([one_m] * space.n_m, format="csr")


def beta_matrix(space: SectorSpace) -> OperatorMatrix:
    m = _channel_permutation(space, {("uA", "uA"): 1, ("uB", "uB"): 1, ("lA", "lA"): -1, ("lB", "lB"): -1})
    return OperatorMatrix(m, space, hermitian=True, label="beta")


def gamma5_matrix(space: SectorSpace) -> OperatorMatrix:
    m = _channel_permutation(space, {("uA", "lA"): 1, ("uB", "lB"): 1, ("lA", "uA"): 1, ("lB", "uB"): 1})
    return OperatorMatrix(m, space, hermitian=True, label="gamma5")


def sigma_rhat_matrix(space: SectorSpace) -> OperatorMatrix:
    """Sigma.rhat: swaps A <-> B within the upper and lower blocks, sign -1."""
    m = _channel_permutation(space, {("uA", "uB"): -1, ("uB", "uA"): -1, ("lA", "lB"): -1, ("lB", "lA"): -1})
    return OperatorMatrix(m, space, hermitian=True, label="sigma_rhat")


def alpha_rhat_matrix(space: SectorSpace) -> OperatorMatrix:
    """alpha.rhat = gamma5 * sigma.rhat: crosses upper <-> lower and A <-> B."""
    m = _channel_permutation(space, {("uA", "lB"): -1, ("lB", "uA"): -1, ("uB", "lA"): -1, ("lA", "uB"): -1})
    return OperatorMatrix(m, space, hermitian=True, label="alpha_rhat")


def doubling_parity_matrix(space: SectorSpace) -> OperatorMatrix:
    """Exact unitary lattice symmetry pairing the two K branches.

    Channel swap (uA <-> uB, lA <-> lB with a sign) composed with the
    site-alternating stagger diag((-1)^i).  Commutes with the Coulomb H,
    anticommutes with K: it maps each K branch onto the other, which is
    why the two branches are exactly isospectral on the lattice.
    """
    n = space.grid.n_points
    stag = sp.diags((-1.0) ** np.arange(n)).tocsr()
    pat = {("uA", "uB"): 1.0, ("uB", "uA"): 1.0, ("lA", "lB"): -1.0, ("lB", "lA"): -1.0}
    blocks = np.zeros((4, 4))
    for (row, col), v in pat.items():
        blocks[CHANNELS.index(row), CHANNELS.index(col)] = v
    one_m = sp.kron(sp.csr_matrix(blocks), stag, format="csr")
    m = sp.block_diag([one_m] * space.n_m, format="csr")
    return OperatorMatrix(m, space, hermitian=True, label="doubling_parity")


def _assemble_h_one_m(grid, kappa_abs: float, a: float, t: np.ndarray | None, extra: dict | None):
    r = grid.nodes
    dmat = _deriv_matrix(grid)
    minv = sp.diags(1.0 / r)
    xp = 1j * (dmat + kappa_abs * minv)
    xm = 1j * (dmat - kappa_abs * minv)
    if t is not None:
        tmat = sp.diags(np.asarray(t, dtype=complex))
        xp_c, xm_c = (xp - tmat).tocsr(), (xm - tmat).tocsr()
    else:
        xp_c, xm_c = xp.tocsr(), xm.tocsr()
    extra = extra or {}

    def diag_for(channel: str, rest_sign: float):
        e = extra.get(channel)
        d = rest_sign - a / r
        if e is not None:
            d = d + np.asarray(e, dtype=float)
        return sp.diags(d.astype(complex))

    z = None
    rows = [
        [diag_for("uA", 1.0), z, z, xp_c],
        [z, diag_for("uB", 1.0), xm_c, z],
        [z, xp_c, diag_for("lA", -1.0), z],
        [xm_c, z, z, diag_for("lB", -1.0)],
    ]
    return sp.bmat(rows, format="csr")


def build_H(
    space: SectorSpace,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
    potential: OperatorMatrix | None = None,
) -> OperatorMatrix:
    """Four-channel Hamiltonian: rest mass, Coulomb -a/r, and the kinetic
    couplings i(d/dr +- kappa/r) between the paired channels.

    `potential`, if given, is an extra term on the same space (e.g. the
    output of `nonabelian_term` or a diagonal breaking term); its meta is
    merged so per-branch dense blocks can be rebuilt downstream.
    """
    t = None
    extra = None
    if potential is not None:
        if potential.space is not space and potential.space != space:
            raise ValueError("potential term lives on a different space")
        t = potential.meta.get("t")
        extra = potential.meta.get("extra_diag")
        if t is None and extra is None:
            raise ValueError("potential term lacks rebuildable meta ('t' or 'extra_diag')")
    one_m = _assemble_h_one_m(space.grid, space.kappa_abs, constants.a, t, extra)
    full = sp.block_diag([one_m] * space.n_m, format="csr")
    label = "H_coulomb" if potential is None else f"H_coulomb+{potential.label or 'term'}"
    return OperatorMatrix(
        full,
        space,
        hermitian=True,
        label=label,
        meta={"constants": constants, "t": t, "extra_diag": extra},
    )


def build_K(space: SectorSpace) -> OperatorMatrix:
    """Spin-orbit operator K = beta (Sigma.L + 1): diagonal +-(j+1/2) per channel."""
    k = space.kappa_abs
    m = _channel_permutation(space, {("uA", "uA"): k, ("uB", "uB"): -k, ("lA", "lA"): -k, ("lB", "lB"): k})
    return OperatorMatrix(m, space, hermitian=True, label="K")


def build_D(
    H: OperatorMatrix,
    K: OperatorMatrix,
    space: SectorSpace,
    constants: PhysicalConstants | None = None,
) -> OperatorMatrix:
    """Johnson-Lippmann-type invariant D = Sigma.rhat - (i/a) K gamma5 (H - beta).

    Built from the lattice H itself, so [H, D] = 0 and {K, D} = 0 hold
    exactly for any Hamiltonian assembled by `build_H`, including the
    nonabelian extension.
    """
    constants = constants or H.meta.get("constants") or DEFAULT_CONSTANTS
    if constants.a == 0.0:
        raise ValueError("D is undefined at a = 0")
    srh = sigma_rhat_matrix(space).mat
    g5 = gamma5_matrix(space).mat
    beta = beta_matrix(space).mat
    core = (K.mat @ (g5 @ (H.mat - beta))).tocsr()
    d = (srh - (1j / constants.a) * core).tocsr()
    op = OperatorMatrix(d, space, hermitian=False, label="D", meta={"constants": constants})
    defect = op.adjoint_defect()
    if defect > 1e-11:
        raise ValueError(f"invariant D not hermitian: defect {defect:.3e}")
    op.hermitian = True
    return op


def j_z_matrix(space: SectorSpace) -> OperatorMatrix:
    n4 = 4 * space.grid.n_points
    blocks = [m * sp.identity(n4, format="csr") for m in space.m_list]
    return OperatorMatrix(sp.block_diag(blocks, format="csr"), space, hermitian=True, label="J_z")


def j_ladder_matrix(space: SectorSpace, direction) -> OperatorMatrix:
    """J_+ or J_- on the m_j index, identity on radius and channels."""
    from ..angular import j_ladder_element

    n4 = 4 * space.grid.n_points
    nm = space.n_m
    d = 1.0 if direction in ("+", +1) else -1.0
    pat = np.zeros((nm, nm))
    for col, m in enumerate(space.m_list):
        target = m + d
        for row, mt in enumerate(space.m_list):
            if abs(mt - target) < 1e-12:
                pat[row, col] = j_ladder_element(space.j, m, direction)
    m = sp.kron(sp.csr_matrix(pat), sp.identity(n4, format="csr"), format="csr")
    return OperatorMatrix(m, space, hermitian=False, label=f"J_{'+' if d > 0 else '-'}")


@dataclass(frozen=True)
class WSpec:
    """Radial profile of the nonabelian vector term: value and derivative."""

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    label: str = ""


def w_inverse_square() -> WSpec:
    return WSpec(
        value=lambda r: -1.0 / (r * r),
        derivative=lambda r: 2.0 / (r * r * r),
        label="-1/r^2",
    )


def _cross_sigma(rvec: np.ndarray) -> np.ndarray:
    """(Sigma x r)_i as three 4x4 matrices."""
    out = np.zeros((3, 4, 4), dtype=complex)
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1.0
    eps[0, 2, 1] = eps[1, 0, 2] = eps[2, 1, 0] = -1.0
    for i in range(3):
        for j in range(3):
            for k in range(3):
                if eps[i, j, k] != 0.0:
                    out[i] += eps[i, j, k] * SIGMA4[j] * rvec[k]
    return out


def sigma_cross_reduction_residual(rvec) -> float:
    """Max-entry residual of alpha.(Sigma x r) = 2i gamma5 (Sigma.r).

    Brute-force check on explicit 4x4 matrices; the reduction is what
    collapses the nonabelian vector term to a multiple of alpha.rhat.
    """
    rvec = np.asarray(rvec, dtype=float)
    cross = _cross_sigma(rvec)
    lhs = sum(ALPHA4[i] @ cross[i] for i in range(3))
    rhs = 2.0j * GAMMA5_4 @ sum(SIGMA4[i] * rvec[i] for i in range(3))
    return float(np.abs(lhs - rhs).max())


_identity_confirmed = False


def _confirm_reduction_identity() -> None:
    global _identity_confirmed
    if _identity_confirmed:
        return
    for rvec in ([1.0, 0.0, 0.0], [0.3, -1.2, 0.7], [-2.0, 0.5, 1.5]):
        res = sigma_cross_reduction_residual(rvec)
        if res > 1e-12:
            raise RuntimeError(
                f"matrix reduction identity failed at r = {rvec}: residual {res:.3e}"
            )
    _identity_confirmed = True


def nonabelian_term(W: WSpec, e: float, space: SectorSpace) -> OperatorMatrix:
    """Vector-coupled extension term 2 e W(r) r (alpha.rhat) on the sector space.

    Rejects profiles more singular than 1/r^2 at the origin (the reduced
    radial factor 2 e W r must stay integrable against the lattice).
    """
    _confirm_reduction_identity()
    r_probe = np.array([1e-4, 1e-6])
    scaled = np.abs(np.asarray(W.value(r_probe), dtype=float) * r_probe**2)
    if scaled[1] > 10.0 * max(scaled[0], 1e-300):
        raise ValueError("W(r) grows faster than 1/r^2 toward the origin")
    r = space.grid.nodes
    t = 2.0 * e * np.asarray(W.value(r), dtype=float) * r
    n = space.grid.n_points
    tmat = sp.diags(t.astype(complex))
    pat = np.zeros((4, 4))
    for row, col in ((0, 3), (3, 0), (1, 2), (2, 1)):
        pat[row, col] = -1.0
    one_m = sp.kron(sp.csr_matrix(pat), tmat, format="csr")
    m = sp.block_diag([one_m] * space.n_m, format="csr")
    label = f"nonabelian[e={e:g},W={W.label or 'custom'}]"
    return OperatorMatrix(m, space, hermitian=True, label=label, meta={"t": t, "e": e, "W": W})


def field_strength(W: WSpec, rvec) -> np.ndarray:
    """Curvature of the nonabelian term at the point rvec, shape (3, 4, 4).

    B_i = i (2W - r W') Sigma_i + i (2 W^2 - W'/r) (Sigma.r) r_i.
    For W = -1/r^2 the second coefficient cancels exactly and the
    curvature is purely spin-directed, (-4i/r^2) Sigma_i.
    """
    rvec = np.asarray(rvec, dtype=float)
    r = float(np.linalg.norm(rvec))
    if r == 0.0:
        raise ValueError("field strength is singular at the origin")
    w = float(W.value(np.array([r]))[0])
    wp = float(W.derivative(np.array([r]))[0])
    c1 = 2.0 * w - r * wp
    c2 = 2.0 * w * w - wp / r
    sig_r = sum(SIGMA4[i] * rvec[i] for i in range(3))
    out = np.empty((3, 4, 4), dtype=complex)
    for i in range(3):
        out[i] = 1j * c1 * SIGMA4[i] + 1j * c2 * sig_r * rvec[i]
    return out


def eig_hermitian(A) -> tuple[np.ndarray, np.ndarray]:
    """Full spectral decomposition of a Hermitian operator (LAPACK evr driver).

    Validates hermiticity of the input and, on the way out, the residual
    ||A V - V diag(w)||_max <= 1e-10 * ||A|| and orthonormality of V to
    1e-10; raises on any violation.
    """
    if isinstance(A, OperatorMatrix):
        if not A.hermitian:
            raise ValueError(f"operator '{A.label}' is not flagged hermitian")
        m = A.dense()
    else:
        m = np.ascontiguousarray(np.asarray(A), dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        scale = max(1.0, float(np.abs(m).max()))
        defect = float(np.abs(m - m.conj().T).max())
        if defect > 1e-12 * scale:
            raise ValueError(f"matrix is not hermitian: ||A - A^H||_max = {defect:.3e}")
    if np.abs(m.imag).max() == 0.0:
        w, v = _dense_eigh(m.real, driver="evr")
        v = v.astype(complex)
    else:
        w, v = _dense_eigh(m, driver="evr")
    scale = max(1.0, float(np.abs(w).max()))
    resid = float(np.abs(m @ v - v * w[None, :]).max())
    if resid > 1e-10 * scale:
        raise ValueError(f"eigen decomposition residual {resid:.3e} exceeds tolerance")
    ortho = float(np.abs(v.conj().T @ v - np.eye(m.shape[0])).max())
    if ortho > 1e-10:
        raise ValueError(f"eigenvector orthonormality defect {ortho:.3e}")
    return w, v


def spectral_norm(mat, n_iter: int = 60) -> float:
    """Deterministic power iteration for the largest singular value."""
    n = mat.shape[1]
    rng = np.random.default_rng(0x5CA1AB1E)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    adj = mat.conj().T if not sp.issparse(mat) else mat.getH()
    s = 0.0
    for _ in range(n_iter):
        w = mat @ v
        s = float(np.linalg.norm(w))
        if s == 0.0:
            return 0.0
        v = adj @ w
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            return s
        v /= nv
    return s


def max_entry(mat) -> float:
    if sp.issparse(mat):
        coo = mat.tocoo()
        return float(np.abs(coo.data).max()) if coo.nnz else 0.0
    arr = np.asarray(mat)
    return float(np.abs(arr).max()) if arr.size else 0.0
