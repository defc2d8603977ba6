"""Doublet algebra and the assembled SO(4) generators on the bound window."""

import numpy as np
import pytest

from so4lab import DEFAULT_CONSTANTS, QuantumNumbers, sommerfeld_energy
from so4lab.oplab import (
    RadialGrid,
    bound_subspace,
    build_D,
    build_H,
    build_K,
    build_pseudospin,
    build_so4,
    default_window,
    single_m,
)
from so4lab.oplab.subspace import branch_block, branch_eigh, lift_block_vector

A = DEFAULT_CONSTANTS.a
E1 = sommerfeld_energy(QuantumNumbers(1, 0.5, -1))

EPS = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    EPS[_i, _j, _k] = 1.0
    EPS[_j, _i, _k] = -1.0


def _comm(x, y):
    return x @ y - y @ x


@pytest.fixture(scope="module")
def pseudo_600(coulomb_600):
    space, h, k, d, sub = coulomb_600
    ps = build_pseudospin(h, k, d, sub)
    return space, h, k, d, sub, ps


def test_doublet_inventory(pseudo_600):
    *_, sub, ps = pseudo_600
    assert ps.n_doublets == 4
    assert len(ps.energies) == 8
    # node-free level carries no doublet: D annihilates it
    assert len(ps.excluded_energies) == 2
    for e in ps.excluded_energies:
        assert abs(e - E1) / (1.0 - E1) < 1e-4
    assert min(abs(e - E1) for e in ps.energies) / (1.0 - E1) > 1e-3


def test_basis_orthonormal(pseudo_600):
    *_, ps = pseudo_600
    b = ps.basis
    gram = b.conj().T @ b
    assert np.abs(gram - np.eye(b.shape[1])).max() < 1e-10


def test_tau_algebra(pseudo_600):
    """[tau_i, tau_j] = 2i eps tau_k, hermitian, involutive, T^2 = 3/4."""
    *_, ps = pseudo_600
    tau = ps.tau
    dim = tau[0].shape[0]
    for i in range(3):
        assert np.abs(tau[i] - tau[i].conj().T).max() < 1e-8
        assert np.abs(tau[i] @ tau[i] - np.eye(dim)).max() < 1e-8
    res = 0.0
    for i in range(3):
        for j in range(3):
            want = 2j * sum(EPS[i, j, k] * tau[k] for k in range(3))
            res = max(res, float(np.abs(_comm(tau[i], tau[j]) - want).max()))
    assert res < 1e-8
    t2 = sum(0.25 * tau[i] @ tau[i] for i in range(3))
    assert np.abs(t2 - 0.75 * np.eye(dim)).max() < 1e-8


def test_tau3_reads_the_branch(pseudo_600):
    """Doublet columns alternate (+kappa source, -kappa image)."""
    *_, ps = pseudo_600
    diag = np.real(np.diag(ps.tau[2]))
    want = np.tile([1.0, -1.0], ps.n_doublets)
    assert np.abs(diag - want).max() < 1e-8


def test_tau1_maps_between_K_branches(pseudo_600):
    """tau_1 applied to a +kappa window eigenvector lands in the span of
    independently computed -kappa eigenvectors of the same level, with
    squared overlap above 1 - 1e-6."""
    space, h, k, d, sub, ps = pseudo_600
    space1 = single_m(space.j, space.grid)
    blk, is_real = branch_block(space.grid, space.kappa_abs, -1, A)
    vals, vecs = branch_eigh(blk, window=sub.window)
    minus = [lift_block_vector(space1, vecs[:, i], -1, is_real) for i in range(vals.size)]

    b = ps.basis
    for idx in range(ps.n_doublets):
        src = 2 * idx
        coords = np.zeros(b.shape[1], dtype=complex)
        coords[src] = 1.0
        image = b @ (ps.tau[0] @ coords)
        image /= np.linalg.norm(image)
        e_level = ps.energies[src]
        # K flips sign on the image
        k1 = build_K(space1)
        assert np.abs(k1.mat @ image + space.kappa_abs * image).max() < 1e-6
        # overlap with the -kappa eigenspace of the same level
        cluster = [v for v, e in zip(minus, vals) if abs(e - e_level) < 0.45 * (1.0 - e_level)]
        assert cluster
        q, _ = np.linalg.qr(np.stack(cluster, axis=1))
        overlap = float(np.linalg.norm(q.conj().T @ image) ** 2)
        assert overlap > 1.0 - 1e-6


def test_so4_generators(pseudo_600):
    space, h, k, d, sub, ps = pseudo_600
    gens = build_so4(space, ps)
    dim = gens.H_sub.shape[0]
    assert dim == 2 * len(ps.energies)

    for i in range(3):
        assert np.abs(_comm(gens.I[i], gens.H_sub)).max() < 1e-12
        assert np.abs(_comm(gens.R[i], gens.H_sub)).max() < 1e-12
        assert np.abs(_comm(gens.J[i], gens.T[i])).max() < 1e-10

    # I closes on itself; R rotates as a vector and closes back into I
    res = 0.0
    for i in range(3):
        for j in range(3):
            want_i = 1j * sum(EPS[i, j, k] * gens.I[k] for k in range(3))
            want_r = 1j * sum(EPS[i, j, k] * gens.R[k] for k in range(3))
            res = max(
                res,
                float(np.abs(_comm(gens.I[i], gens.I[j]) - want_i).max()),
                float(np.abs(_comm(gens.I[i], gens.R[j]) - want_r).max()),
                float(np.abs(_comm(gens.R[i], gens.R[j]) - want_i).max()),
            )
    assert res < 1e-8


def test_so4_requires_full_multiplet():
    grid = RadialGrid.uniform(300, 200.0 / A)
    space1 = single_m(0.5, grid, 0.5)
    h = build_H(space1)
    k = build_K(space1)
    d = build_D(h, k, space1)
    sub = bound_subspace(h, default_window(2, 0.5), refine=False)
    ps = build_pseudospin(h, k, d, sub)
    with pytest.raises(ValueError, match="full j multiplet"):
        build_so4(space1, ps)


def test_pseudospin_needs_admissible_doublets():
    """A window holding only the node-free level leaves nothing for the
    doublet algebra to act on."""
    grid = RadialGrid.uniform(300, 200.0 / A)
    space1 = single_m(0.5, grid, 0.5)
    h = build_H(space1)
    k = build_K(space1)
    d = build_D(h, k, space1)
    sub = bound_subspace(h, default_window(1, 0.5), refine=False)
    with pytest.raises(ValueError, match="doublet"):
        build_pseudospin(h, k, d, sub)
