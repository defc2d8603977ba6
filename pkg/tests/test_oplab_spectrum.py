"""Bound-window extraction: counts, roles, residuals, convergence."""

import numpy as np
import pytest

from so4lab import DEFAULT_CONSTANTS, QuantumNumbers, sommerfeld_energy
from so4lab.oplab import (
    RadialGrid,
    analytic_residual,
    default_window,
    expected_window_count,
    full_multiplet,
)

A = DEFAULT_CONSTANTS.a
E1 = sommerfeld_energy(QuantumNumbers(1, 0.5, -1))
E2 = sommerfeld_energy(QuantumNumbers(2, 0.5, -1))
E3 = sommerfeld_energy(QuantumNumbers(3, 0.5, -1))


def test_window_counts(coulomb_600):
    *_, sub = coulomb_600
    assert expected_window_count(3, 0.5) == 5
    assert sub.count(1) == 5
    assert sub.count(-1) == 5
    lo, hi = sub.window
    for s in sub.states:
        assert lo < s.energy < hi


def test_ground_level_accuracy(coulomb_600):
    *_, sub = coulomb_600
    emin = min(s.energy for s in sub.states)
    assert abs(emin - E1) / (1.0 - E1) < 1e-4


def test_level_cluster_structure(coulomb_600):
    """Each branch: one isolated node-free state, then doubler-resolved
    smooth/staggered pairs for n = 2, 3."""
    *_, sub = coulomb_600
    for kb in (1, -1):
        states = sub.branches[kb].states
        isolated = [s for s in states if s.role == "isolated"]
        smooth = [s for s in states if s.role == "smooth"]
        staggered = [s for s in states if s.role == "staggered"]
        assert len(isolated) == 1 and isolated[0].ker_d
        assert len(smooth) == 2 and len(staggered) == 2
        for s in smooth:
            assert s.stagger_weight < 0.05
            assert s.cluster_size == 2
        for s in staggered:
            assert s.stagger_weight > 0.9
        # cluster partners agree in energy far below the level spacing
        for s_sm in smooth:
            partner = [s for s in staggered if s.cluster_id == s_sm.cluster_id]
            assert len(partner) == 1
            assert abs(partner[0].energy - s_sm.energy) < 1e-9


def test_d2_scalar_nonnegative(coulomb_600):
    """1 + (E^2 - 1) kappa^2 / a^2 >= 0 for every lattice eigenvalue; this
    is the operator identity that forbids states below sqrt(1 - a^2)."""
    *_, sub = coulomb_600
    for s in sub.states:
        assert s.d2_scalar >= -1e-12


def test_kernel_of_D_is_the_node_free_pair(coulomb_600):
    *_, sub = coulomb_600
    excluded = sub.excluded_ker_d()
    assert len(excluded) == 2
    assert sorted(s.k_branch for s in excluded) == [-1, 1]
    for s in excluded:
        assert abs(s.energy - E1) / (1.0 - E1) < 1e-4


def test_eq4_residuals(coulomb_600):
    *_, sub = coulomb_600
    for s in sub.states:
        assert s.eq4_residual is not None
        assert s.eq4_residual < 1e-9


def test_refinement_drops_nothing_here(coulomb_600):
    *_, sub = coulomb_600
    for kb in (1, -1):
        assert sub.branches[kb].dropped_refine == []


def test_window_validation():
    with pytest.raises(ValueError):
        default_window(0, 0.5)
    lo, hi = default_window(3, 0.5)
    assert lo < E1 < E2 < E3 < hi


def test_analytic_injection_converges_at_second_order():
    """Exact eigenpair pushed through the lattice operator: the residual
    must drop by ~4x when h halves."""
    res = {}
    for n_pts in (1000, 2000):
        space = full_multiplet(0.5, RadialGrid.uniform(n_pts, 120.0 / A))
        res[n_pts] = analytic_residual(1, 0.5, -1, space)
    assert res[2000] < 2e-5
    ratio = res[1000] / res[2000]
    assert 3.6 < ratio < 4.4


def test_analytic_injection_all_low_levels():
    """Every (n <= 3, j, sign) label passes through its own multiplet."""
    labels = [
        (1, 0.5, -1), (2, 0.5, -1), (2, 0.5, +1), (2, 1.5, -1),
        (3, 0.5, -1), (3, 0.5, +1), (3, 1.5, -1), (3, 1.5, +1), (3, 2.5, -1),
    ]
    spaces = {}
    worst = 0.0
    for n, j, sign in labels:
        if j not in spaces:
            spaces[j] = full_multiplet(j, RadialGrid.uniform(4000, 120.0 / A))
        worst = max(worst, analytic_residual(n, j, sign, spaces[j]))
    assert worst < 1e-5
