"""Closed-form radial pairs: series, quadrature, and the E-b identities."""

import math

import mpmath
import numpy as np
import pytest

from so4lab import DEFAULT_CONSTANTS, QuantumNumbers, sommerfeld_energy
from so4lab.radial import (
    KummerParams,
    b_relation_residuals,
    build_solution,
    kummer,
    radial_mesh,
    verify_b_identity,
)

A = DEFAULT_CONSTANTS.a


def _valid_labels(n_max):
    out = []
    for n in range(1, n_max + 1):
        two_j = 1
        while two_j / 2.0 + 0.5 <= n:
            j = two_j / 2.0
            out.append((n, j, -1))
            if n > j + 0.5:
                out.append((n, j, +1))
            two_j += 2
    return out


def test_kummer_against_mpmath():
    z = np.array([-5.0, -1.3, -0.1, 0.0, 0.1, 0.7, 2.5, 5.0])
    for alpha, beta in ((-3.0, 1.5), (-1.0, 3.0), (0.0, 2.0), (0.37, 1.25), (2.0, 4.5)):
        got = kummer(KummerParams(alpha, beta, z))
        want = np.array([float(mpmath.hyp1f1(alpha, beta, zz)) for zz in z])
        assert np.max(np.abs(got - want) / np.maximum(np.abs(want), 1.0)) < 1e-13


def test_kummer_terminates_for_nonpositive_integer_alpha():
    """alpha = -n gives a degree-n polynomial: value at large z stays finite
    and matches the explicit polynomial."""
    z = np.array([30.0])
    got = float(kummer(KummerParams(-2.0, 3.0, z))[0])
    want = 1.0 - 2.0 * 30.0 / 3.0 + 30.0**2 / 12.0  # 1 - (2/3)z + z^2/12
    assert abs(got - want) / abs(want) < 1e-14


def test_kummer_rejects_nonpositive_integer_beta():
    for beta in (0.0, -1.0, -3.0):
        with pytest.raises(ValueError):
            kummer(KummerParams(1.0, beta, np.array([0.5])))


def test_mesh_integrates_exponential():
    mesh = radial_mesh(40.0)
    got = float(np.sum(mesh.weights * np.exp(-mesh.nodes)))
    want = 1.0 - math.exp(-40.0)
    assert abs(got - want) < 1e-12
    assert mesh.nodes[0] > 0.0
    assert mesh.nodes[-1] < mesh.r_max


def test_ground_overlap_parameter_equals_coupling():
    sol = build_solution(1, 0.5, -1)
    assert abs(sol.b - A) < 1e-10
    assert sol.lower_phase == -1
    assert sol.norm > 0.0
    assert sol.energy == sommerfeld_energy(QuantumNumbers(1, 0.5, -1))


def test_norm_against_adaptive_quadrature():
    """Panel Gauss-Legendre norm vs mpmath adaptive integration of the
    same closed form, an independent quadrature scheme."""
    for n, j, sign in ((1, 0.5, -1), (2, 0.5, +1)):
        sol = build_solution(n, j, sign)
        def density(r):
            f, g = sol.sample(float(r))
            return f * f + g * g
        want = float(mpmath.quad(density, [0.0, sol.mesh.r_max / 4.0, sol.mesh.r_max]))
        assert abs(sol.norm - want) / want < 1e-9


def test_sample_agrees_with_mesh_arrays():
    sol = build_solution(2, 1.5, -1)
    for k in (0, 17, 256, len(sol.f) - 1):
        f, g = sol.sample(float(sol.mesh.nodes[k]))
        assert f == pytest.approx(sol.f[k], rel=1e-12, abs=1e-300)
        assert g == pytest.approx(sol.g[k], rel=1e-12, abs=1e-300)


def test_quadratic_identity_on_node_free_solutions():
    """E (1 - ...) form closes at machine precision when f, g have no nodes."""
    for n, j in ((1, 0.5), (2, 1.5), (3, 2.5)):
        assert verify_b_identity(n, j, -1) < 1e-12


def test_quadratic_identity_fails_once_nodes_appear():
    """With radial nodes the quadratic overlap form is indefinite and the
    residual is genuinely O(1e-5), not a quadrature artifact; the linear
    relation below is the one that survives."""
    res = verify_b_identity(2, 0.5, -1)
    assert res > 1e-7


def test_linear_relation_everywhere():
    for n, j, sign in _valid_labels(5):
        res = b_relation_residuals(n, j, sign)
        assert res["linear"] < 1e-9, (n, j, sign, res)


def test_overlap_parameter_positive_everywhere():
    for n, j, sign in _valid_labels(4):
        sol = build_solution(n, j, sign)
        assert sol.b > 0.0


def test_mesh_truncation_guard():
    """A mesh far too short for the target state must be rejected, not
    silently integrated."""
    with pytest.raises(ValueError, match="truncat"):
        build_solution(3, 0.5, -1, mesh=radial_mesh(60.0))
