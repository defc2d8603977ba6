"""Windowed bound-state extraction and doubler-aware subspace assembly.

The full Hamiltonian is block diagonal over the two K branches (and over
m_j).  Each 2N x 2N branch block is solved densely with the LAPACK evr
driver; pure-Coulomb blocks (and diagonal perturbations of them) are
rotated to a real symmetric gauge first, (upper, lower) -> (upper,
-i lower).

Lattice doubling: an exact unitary (channel swap times site stagger) maps
each K branch onto the other, so every branch's window contains both its
native smooth states and staggered images of the partner branch.  Where a
native state and an image land on the same level (every level with radial
count >= 1) they hybridize into near-degenerate pairs of true lattice
eigenvectors that are roughly half smooth, half staggered.  The cluster
machinery here groups such pairs by eigenvalue gap and resolves each
group against the site-staggering quadratic form, recovering one smooth
and one staggered representative; smooth representatives are the physical
states for labeling and first-order perturbation theory.  Zero-node
levels are unpaired singletons.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh as _dense_eigh

from ..spectra import DEFAULT_CONSTANTS, PhysicalConstants, QuantumNumbers, sommerfeld_energy
from .matrices import OperatorMatrix, build_D, build_H, build_K
from .space import RadialGrid, SectorSpace, single_m

__all__ = [
    "branch_block",
    "branch_eigh",
    "lift_block_vector",
    "group_clusters",
    "stagger_form_value",
    "resolve_cluster",
    "BoundState",
    "BranchSolve",
    "BoundSubspace",
    "bound_subspace",
    "default_window",
    "expected_window_count",
    "analytic_residual",
]


def branch_block(
    grid: RadialGrid,
    kappa_abs: float,
    k_branch: int,
    a: float,
    t: np.ndarray | None = None,
    extra_diag: tuple[np.ndarray | None, np.ndarray | None] = (None, None),
) -> tuple[np.ndarray, bool]:
    """Dense 2N x 2N block of one K branch; returns (matrix, is_real_gauge).

    k_branch = +1 couples (uA, lB), -1 couples (uB, lA); the signed K
    eigenvalue is k_branch * kappa_abs.  The real gauge is used whenever
    the vector term t is absent.
    """
    if k_branch not in (-1, 1):
        raise ValueError(f"k_branch must be +-1, got {k_branch!r}")
    n = grid.n_points
    r = grid.nodes
    kp = k_branch * kappa_abs
    d_up = 1.0 - a / r
    d_lo = -1.0 - a / r
    eu, el = extra_diag
    if eu is not None:
        d_up = d_up + np.asarray(eu, dtype=float)
    if el is not None:
        d_lo = d_lo + np.asarray(el, dtype=float)
    c = 0.5 / grid.h
    if t is None:
        m = np.zeros((2 * n, 2 * n))
        idx = np.arange(n)
        m[idx, idx] = d_up
        m[n + idx, n + idx] = d_lo
        # real gauge: upper-right -(d/dr + kp/r), lower-left its transpose
        m[idx, n + idx] = -kp / r
        m[idx[:-1], n + idx[1:]] = -c
        m[idx[1:], n + idx[:-1]] = c
        m[n + idx, idx] = -kp / r
        m[n + idx[1:], idx[:-1]] = -c
        m[n + idx[:-1], idx[1:]] = c
        return m, True
    m = np.zeros((2 * n, 2 * n), dtype=complex)
    idx = np.arange(n)
    m[idx, idx] = d_up
    m[n + idx, n + idx] = d_lo
    tv = np.asarray(t, dtype=float)
    m[idx, n + idx] = 1j * kp / r - tv
    m[idx[:-1], n + idx[1:]] = 1j * c
    m[idx[1:], n + idx[:-1]] = -1j * c
    m[n + idx, idx] = -1j * kp / r - tv
    m[n + idx[1:], idx[:-1]] = -1j * c
    m[n + idx[:-1], idx[1:]] = 1j * c
    return m, False


def branch_eigh(
    block: np.ndarray,
    window: tuple[float, float] | None = None,
    vectors: bool = True,
):
    """Eigensolve of a branch block, optionally restricted to an energy window."""
    kwargs: dict = {"driver": "evr"}
    if window is not None:
        kwargs["subset_by_value"] = window
    if vectors:
        return _dense_eigh(block, **kwargs)
    return _dense_eigh(block, eigvals_only=True, **kwargs)


def lift_block_vector(
    space: SectorSpace,
    vec: np.ndarray,
    k_branch: int,
    is_real_gauge: bool,
    m_index: int = 0,
) -> np.ndarray:
    """Embed a 2N branch vector into the 4-channel space (l2 norm kept)."""
    n = space.grid.n_points
    upper = vec[:n].astype(complex)
    lower = vec[n:].astype(complex)
    if is_real_gauge:
        lower = 1j * lower
    return space.embed_block(upper, lower, k_branch, m_index)


def group_clusters(vals: np.ndarray, gap_tol: float) -> list[slice]:
    """Partition sorted eigenvalues into near-degenerate groups."""
    if len(vals) == 0:
        return []
    out = []
    start = 0
    for i in range(1, len(vals)):
        if vals[i] - vals[i - 1] > gap_tol:
            out.append(slice(start, i))
            start = i
    out.append(slice(start, len(vals)))
    return out


def stagger_form_value(vec: np.ndarray, n: int) -> float:
    """Site-alternation weight in [0, 1]: ~0 smooth, ~1 fully staggered.

    Quadratic form sum |v_{i+1} - v_i|^2 / 4 over both radial halves of a
    unit block vector; a smooth lattice function scores O(h^2), the
    staggered doubler image scores ~1.
    """
    u, w = vec[:n], vec[n:]
    q = 0.0
    for part in (u, w):
        d = np.diff(part)
        q += float(np.real(np.vdot(d, d))) / 4.0
    return q


def resolve_cluster(vecs: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Rotate a cluster of eigenvectors into staggering eigenmodes.

    Returns (rotated vectors, staggering weights), weights ascending, so
    column 0 is the smooth (physical) representative.  For singleton
    clusters this is the identity.
    """
    k = vecs.shape[1]
    if k == 1:
        return vecs.copy(), np.array([stagger_form_value(vecs[:, 0], n)])
    gram = np.zeros((k, k), dtype=complex)
    du = np.diff(vecs[:n, :], axis=0)
    dw = np.diff(vecs[n:, :], axis=0)
    gram = (du.conj().T @ du + dw.conj().T @ dw) / 4.0
    wts, rot = _dense_eigh(gram)
    return vecs @ rot, wts.real


@dataclass(frozen=True, eq=False)
class BoundState:
    """One resolved window state of a K branch.

    `vector` is the l2-unit resolved representative on the single-m
    four-channel space (for hybridized pairs: the smooth or staggered
    diabatic member; for singletons: the eigenvector itself).  `energy`
    is its Rayleigh quotient, which agrees with the cluster eigenvalues
    to within the hybridization gap.
    """

    energy: float
    k_branch: int
    cluster_id: int
    cluster_size: int
    stagger_weight: float
    role: str  # "isolated" | "smooth" | "staggered"
    d2_scalar: float
    ker_d: bool
    vector: np.ndarray = dc_field(repr=False)
    refine_shift: float | None = None
    eq4_residual: float | None = None


@dataclass
class BranchSolve:
    """Raw windowed eigendata of one K branch (single m_j block)."""

    k_branch: int
    energies: np.ndarray
    eigvecs: np.ndarray  # (2N, k) in the solve gauge
    is_real_gauge: bool
    clusters: list[slice]
    states: list[BoundState]
    dropped_refine: list[float] = dc_field(default_factory=list)
    dropped_anomaly: list[float] = dc_field(default_factory=list)


@dataclass
class BoundSubspace:
    """Bound window content of both K branches plus exclusion bookkeeping."""

    space: SectorSpace
    window: tuple[float, float]
    constants: PhysicalConstants
    branches: dict[int, BranchSolve]
    kerd_floor: float
    kerd_threshold: float

    @property
    def states(self) -> list[BoundState]:
        out = []
        for kb in (1, -1):
            out.extend(self.branches[kb].states)
        return out

    def count(self, k_branch: int | None = None) -> int:
        if k_branch is None:
            return sum(len(self.branches[kb].states) for kb in (1, -1))
        return len(self.branches[k_branch].states)

    def excluded_ker_d(self) -> list[BoundState]:
        """States excluded from pseudo-spin assembly because D^2 ~ 0 on them."""
        return [s for s in self.states if s.ker_d]

    def admissible_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """True eigenvectors of the +kappa branch off the kernel of D.

        Returns (energies, eigvecs) with eigvecs (2N, k) in the solve
        gauge; the doublet partners in the -kappa branch are generated by
        applying D, which is exact, so only this branch's vectors are
        needed.
        """
        br = self.branches[1]
        keep = []
        for i, e in enumerate(br.energies):
            d2 = _d2_scalar(e, self.space.kappa_abs, self.constants.a)
            if d2 >= self.kerd_threshold:
                keep.append(i)
        return br.energies[keep], br.eigvecs[:, keep]

    def doublet_basis(self, d_one_m: sp.spmatrix) -> tuple[np.ndarray, np.ndarray]:
        """Orthonormal doublet columns [psi_1, Dpsi_1/|..|, psi_2, ...] on the
        single-m channel space, with the per-column energies.

        D maps the +kappa branch to the -kappa branch preserving the
        eigenvalue exactly, and |D psi|^2 equals the D^2 scalar of the
        level, so normalized images are exactly orthonormal to each other
        and to the sources.
        """
        energies, vecs = self.admissible_pairs()
        br = self.branches[1]
        n = self.space.grid.n_points
        space1 = single_m(self.space.j, self.space.grid)
        dim = space1.dim
        cols = []
        es = []
        for i in range(vecs.shape[1]):
            psi = lift_block_vector(space1, vecs[:, i], 1, br.is_real_gauge)
            chi = d_one_m @ psi
            nrm = float(np.linalg.norm(chi))
            if nrm == 0.0:
                raise ValueError("D image vanished on an admissible state")
            cols.append(psi)
            cols.append(chi / nrm)
            es.append(energies[i])
            es.append(energies[i])
        b = np.stack(cols, axis=1) if cols else np.zeros((dim, 0), dtype=complex)
        return b, np.asarray(es)


def _d2_scalar(energy: float, kappa_abs: float, a: float) -> float:
    return 1.0 + (energy * energy - 1.0) * kappa_abs * kappa_abs / (a * a)


def default_window(n_max: int, j: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> tuple[float, float]:
    """Energy window containing exactly the n <= n_max bound levels of sector j."""
    n_lowest = int(round(j + 0.5))
    if n_max < n_lowest:
        raise ValueError(f"n_max = {n_max} admits no bound states at j = {j}")
    e_lo = sommerfeld_energy(QuantumNumbers(n_lowest, j, -1), constants)
    e_hi = sommerfeld_energy(QuantumNumbers(n_max, j, -1), constants)
    e_next = sommerfeld_energy(QuantumNumbers(n_max + 1, j, -1), constants)
    return (2.0 * e_lo - 1.0, 0.5 * (e_hi + e_next))


def expected_window_count(n_max: int, j: float) -> int:
    """Per-branch window count: native states plus partner-branch doubler images."""
    n_lowest = int(round(j + 0.5))
    native_minus = n_max - n_lowest + 1  # kappa_sign = -1 family
    native_plus = max(n_max - n_lowest, 0)  # kappa_sign = +1 family
    return native_minus + native_plus


def bound_subspace(
    H: OperatorMatrix,
    window: tuple[float, float],
    refine: bool = True,
    cluster_gap_tol: float = 1e-7,
    refine_tol: float = 1e-7,
    anomaly_factor: float = 5.0,
    kerd_threshold: float = 0.5,
    kerd_floor: float = 1e-8,
) -> BoundSubspace:
    """Solve the window on both K branches and resolve doubling structure.

    Filters: (i) grid-refinement stability, states whose eigenvalue moves
    more than `refine_tol` at half the spacing are dropped as spurious;
    (ii) the squared-invariant identity, states violating
    D^2 = 1 + (E^2-1)(j+1/2)^2/a^2 by more than `anomaly_factor` times the
    median residual are dropped.  States whose D^2 scalar falls below
    `kerd_threshold` (in particular below the floor `kerd_floor`) are kept
    but flagged ker_d and excluded from pseudo-spin assembly.
    """
    space = H.space
    constants = H.meta.get("constants") or DEFAULT_CONSTANTS
    a = constants.a
    kap = space.kappa_abs
    t = H.meta.get("t")
    extra = H.meta.get("extra_diag") or {}
    grid = space.grid

    space1 = single_m(space.j, grid)
    h1 = build_H(space1, constants, _reuse_term(space1, t, extra))
    k1 = build_K(space1)
    d1 = build_D(h1, k1, space1, constants).mat

    fine_vals: dict[int, np.ndarray] = {}
    if refine:
        grid2 = grid.refine()
        for kb in (1, -1):
            eu, el = _branch_extra(_interp_extra(extra, grid, grid2), kb)
            t2 = None if t is None else _interp_nodes(t, grid, grid2)
            blk2, _ = branch_block(grid2, kap, kb, a, t2, (eu, el))
            fine_vals[kb] = np.asarray(branch_eigh(blk2, window, vectors=False))

    branches: dict[int, BranchSolve] = {}
    for kb in (1, -1):
        eu, el = _branch_extra(extra, kb)
        blk, is_real = branch_block(grid, kap, kb, a, t, (eu, el))
        vals, vecs = branch_eigh(blk, window, vectors=True)
        vals = np.asarray(vals)

        keep = np.ones(len(vals), dtype=bool)
        dropped_refine: list[float] = []
        if refine and len(vals):
            fv = fine_vals[kb]
            for i, e in enumerate(vals):
                shift = np.abs(fv - e).min() if len(fv) else np.inf
                if shift > refine_tol * max(1.0, abs(e)):
                    keep[i] = False
                    dropped_refine.append(float(e))

        n = grid.n_points
        eq4 = np.zeros(len(vals))
        for i, e in enumerate(vals):
            psi = lift_block_vector(space1, vecs[:, i], kb, is_real)
            scal = _d2_scalar(e, kap, a)
            resid = d1 @ (d1 @ psi) - scal * psi
            eq4[i] = float(np.linalg.norm(resid))
        dropped_anomaly: list[float] = []
        if len(vals):
            med = float(np.median(eq4[keep])) if keep.any() else 0.0
            if med > 0.0:
                for i in range(len(vals)):
                    if keep[i] and eq4[i] > anomaly_factor * med and eq4[i] > 1e-10:
                        keep[i] = False
                        dropped_anomaly.append(float(vals[i]))

        vals_k = vals[keep]
        vecs_k = vecs[:, keep]
        eq4_k = eq4[keep]
        clusters = group_clusters(vals_k, cluster_gap_tol)
        states: list[BoundState] = []
        for cid, cl in enumerate(clusters):
            sub = vecs_k[:, cl]
            rot, wts = resolve_cluster(sub, n)
            size = sub.shape[1]
            cluster_eq4 = float(eq4_k[cl].max())
            for pos in range(size):
                v = rot[:, pos]
                energy = float(np.real(np.vdot(v, blk @ v)))
                role = "isolated" if size == 1 else ("smooth" if pos == 0 else "staggered")
                if size > 2 and 0 < pos < size - 1:
                    role = "mixed"
                d2 = _d2_scalar(energy, kap, a)
                states.append(
                    BoundState(
                        energy=energy,
                        k_branch=kb,
                        cluster_id=cid,
                        cluster_size=size,
                        stagger_weight=float(wts[pos]),
                        role=role,
                        d2_scalar=d2,
                        ker_d=bool(d2 < kerd_threshold),
                        vector=lift_block_vector(space1, v, kb, is_real),
                        refine_shift=None,
                        eq4_residual=cluster_eq4,
                    )
                )
        branches[kb] = BranchSolve(
            k_branch=kb,
            energies=vals_k,
            eigvecs=vecs_k,
            is_real_gauge=is_real,
            clusters=clusters,
            states=states,
            dropped_refine=dropped_refine,
            dropped_anomaly=dropped_anomaly,
        )
    return BoundSubspace(
        space=space,
        window=window,
        constants=constants,
        branches=branches,
        kerd_floor=kerd_floor,
        kerd_threshold=kerd_threshold,
    )


def _branch_extra(extra: dict, k_branch: int) -> tuple[np.ndarray | None, np.ndarray | None]:
    if not extra:
        return (None, None)
    if k_branch == 1:
        return (extra.get("uA"), extra.get("lB"))
    return (extra.get("uB"), extra.get("lA"))


def _interp_nodes(values: np.ndarray, grid: RadialGrid, grid2: RadialGrid) -> np.ndarray:
    return np.interp(grid2.nodes, grid.nodes, np.asarray(values, dtype=float))


def _interp_extra(extra: dict, grid: RadialGrid, grid2: RadialGrid) -> dict:
    if not extra:
        return {}
    return {ch: _interp_nodes(v, grid, grid2) for ch, v in extra.items() if v is not None}


def _reuse_term(space1: SectorSpace, t, extra) -> OperatorMatrix | None:
    if t is None and not extra:
        return None
    meta = {}
    if t is not None:
        meta["t"] = t
    if extra:
        meta["extra_diag"] = extra
    return OperatorMatrix(
        sp.csr_matrix((space1.dim, space1.dim), dtype=complex),
        space1,
        hermitian=True,
        label="reused-term",
        meta=meta,
    )


def analytic_residual(
    n: int,
    j: float,
    kappa_sign: int,
    space: SectorSpace,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
    rho_scale_factor: float = 1.0,
) -> float:
    """Relative residual |H v - E v| / |v| of the closed-form bound pair
    injected on the lattice (h-weighted norm).

    Second-order accurate in h with the r_min = h grid convention; a wrong
    decay scale (rho_scale_factor != 1) destroys the residual, which makes
    this a sharp end-to-end check of both the analytic solution and the
    lattice operator.
    """
    from ..radial import build_solution

    sol = build_solution(n, j, kappa_sign, constants)
    r = space.grid.nodes * rho_scale_factor
    f, g = sol.sample(r)
    space1 = single_m(j, space.grid)
    k_branch = -kappa_sign  # K eigenvalue is opposite in sign to standard kappa
    v = space1.embed_block(f.astype(complex), 1j * sol.lower_phase * g, k_branch)
    h1 = build_H(space1, constants)
    hv = h1.mat @ v
    ev = sol.energy * v
    return float(np.linalg.norm(hv - ev) / np.linalg.norm(v))
