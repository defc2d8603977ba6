"""Lamb-shift style breaking: closed forms, lattice shifts, report gates."""

import math

import numpy as np
import pytest

from so4lab import DEFAULT_CONSTANTS
from so4lab.breaking import (
    DELTA_STENCILS,
    LambParams,
    breaking_report,
    delta_coefficient,
    delta_profile,
    density_at_origin_sq,
    lamb_splitting_2s2p,
    lamb_term,
    mean_inv_r3,
    perturbative_shift,
    sigma_L_closed_form,
)
from so4lab.oplab import RadialGrid, single_m
from so4lab import to_frequency

A = DEFAULT_CONSTANTS.a

# frozen float64 evaluations of the closed forms at mu = a^2
PERT_2S_HZ = 1307672112.1981525
PERT_2P_HZ = -16955472.13072681
SPLIT_HZ = 1324627584.3288794


def test_contact_strength_closed_form():
    mu = A * A
    want = (4.0 * A * A / 3.0) * (math.log(1.0 / mu) - 0.2)
    assert delta_coefficient(mu) == pytest.approx(want, rel=1e-15)
    with pytest.raises(ValueError):
        delta_coefficient(0.0)
    with pytest.raises(ValueError):
        delta_coefficient(1.5)


def test_hydrogenic_matrix_elements():
    assert density_at_origin_sq(1) == pytest.approx(A**3 / math.pi, rel=1e-15)
    assert density_at_origin_sq(2) == pytest.approx(A**3 / (8.0 * math.pi), rel=1e-15)
    assert mean_inv_r3(2, 1) == pytest.approx(A**3 / 24.0, rel=1e-15)
    with pytest.raises(ValueError):
        mean_inv_r3(2, 0)
    with pytest.raises(ValueError):
        mean_inv_r3(1, 1)


def test_spin_orbit_eigenvalues():
    assert sigma_L_closed_form(0, 0.5) == 0.0
    assert sigma_L_closed_form(1, 1.5) == 1.0
    assert sigma_L_closed_form(1, 0.5) == -2.0
    with pytest.raises(ValueError):
        sigma_L_closed_form(1, 2.5)


def test_perturbative_shifts():
    params = LambParams(mu=A * A)
    s2s = perturbative_shift(2, 0, 0.5, params)
    s2p = perturbative_shift(2, 1, 0.5, params)
    assert s2s == pytest.approx(PERT_2S_HZ, rel=1e-12)
    assert s2p == pytest.approx(PERT_2P_HZ, rel=1e-12)
    # independent recomposition from the matrix elements
    want_2p = to_frequency(A**2 / (4.0 * math.pi) * (-2.0) * mean_inv_r3(2, 1))
    assert s2p == pytest.approx(want_2p, rel=1e-14)
    # contact term only touches l = 0; spin-orbit only l >= 1
    only_delta = LambParams(mu=A * A, include_spin_orbit=False)
    assert perturbative_shift(2, 1, 0.5, only_delta) == 0.0
    only_so = LambParams(mu=A * A, include_delta=False)
    assert perturbative_shift(2, 0, 0.5, only_so) == 0.0


def test_splitting_value_window_and_monotonicity():
    mu = A * A
    split = lamb_splitting_2s2p(mu)
    assert split == pytest.approx(SPLIT_HZ, rel=1e-12)
    assert 0.8e9 < split < 1.6e9
    assert lamb_splitting_2s2p(0.5 * mu) > split > lamb_splitting_2s2p(2.0 * mu)


def test_delta_profile_unit_mass():
    grid = RadialGrid.uniform(500, 1000.0)
    for stencil in DELTA_STENCILS:
        b = delta_profile(grid, stencil)
        assert grid.h * b.sum() == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError, match="stencil"):
        delta_profile(grid, "midpoint")


def test_lamb_term_structure():
    """Contact-only operator: diagonal, supported on the first few nodes,
    and acting only on the l = 0 channels of the j = 1/2 sector."""
    space = single_m(0.5, RadialGrid.uniform(400, 120.0 / A))
    op = lamb_term(space, LambParams(mu=A * A, include_spin_orbit=False))
    dense = op.mat.toarray()
    assert np.abs(dense - np.diag(np.diag(dense))).max() == 0.0
    diag = np.real(np.diag(dense))
    n = space.grid.n_points
    support = np.nonzero(np.abs(diag) > 0.0)[0]
    assert support.size > 0
    assert all(idx % n < 5 for idx in support)
    assert op.adjoint_defect() == 0.0


def test_breaking_report_passes():
    space = single_m(0.5, RadialGrid.uniform(1500, 120.0 / A))
    rep = breaking_report(space, LambParams(mu=A * A))
    by_label = {e.label: e for e in rep.entries}
    assert rep.passed
    assert by_label["commutator_K_preserved"].value < 1e-12
    assert by_label["commutator_J_preserved"].value < 1e-12
    assert by_label["breaking_ratio_D"].value >= 100.0
    assert by_label["shift_2S_ratio"].value < 0.2
    assert by_label["shift_2P_ratio"].value < 0.2
    assert 0.8e9 < by_label["splitting_2s2p_hz"].value < 1.6e9
    assert by_label["splitting_mu_monotone"].passed


def test_breaking_report_both_stencils_agree():
    space = single_m(0.5, RadialGrid.uniform(1500, 120.0 / A))
    rep = breaking_report(space, LambParams(mu=A * A), stencil="extrapolated")
    assert rep.passed


def test_breaking_report_fails_with_terms_disabled():
    space = single_m(0.5, RadialGrid.uniform(800, 120.0 / A))
    rep = breaking_report(
        space, LambParams(mu=A * A, include_delta=False, include_spin_orbit=False)
    )
    assert not rep.passed


def test_breaking_report_rejects_unknown_stencil():
    space = single_m(0.5, RadialGrid.uniform(400, 120.0 / A))
    with pytest.raises(ValueError, match="stencil"):
        breaking_report(space, LambParams(mu=A * A), stencil="nearest")
