"""Shared lattice fixtures.

The j = 1/2 multiplet at N = 600, r_max = 200/a is large enough to resolve
the n <= 3 window cleanly and small enough to build once per session.
"""

import pytest

from so4lab import DEFAULT_CONSTANTS
from so4lab.oplab import (
    RadialGrid,
    bound_subspace,
    build_D,
    build_H,
    build_K,
    default_window,
    full_multiplet,
)

A = DEFAULT_CONSTANTS.a


@pytest.fixture(scope="session")
def coulomb_600():
    """(space, H, K, D, subspace) for j = 1/2, n <= 3, N = 600."""
    grid = RadialGrid.uniform(600, 200.0 / A)
    space = full_multiplet(0.5, grid)
    h = build_H(space)
    k = build_K(space)
    d = build_D(h, k, space)
    sub = bound_subspace(h, default_window(3, 0.5))
    return space, h, k, d, sub
