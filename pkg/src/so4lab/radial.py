"""Closed-form bound radial functions of the point-charge problem.

Reduced-component convention: f and g are r times the 3D radial
amplitudes, so the norm is a plain 1D integral of f^2 + g^2 and both
components vanish at the origin like rho^nu.  The physical lower spinor
channel carries an extra factor i; `RadialSolution.lower_phase` records
the sign s with which the stored g relates to it (lower = i*s*g), chosen
so that the cross overlap b = <2fg> is positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import roots_legendre

from .spectra import DEFAULT_CONSTANTS, PhysicalConstants, QuantumNumbers, sommerfeld_energy

__all__ = [
    "KummerParams",
    "kummer",
    "RadialMesh",
    "radial_mesh",
    "RadialSolution",
    "build_solution",
    "normalization",
    "b_overlap",
    "verify_b_identity",
    "b_relation_residuals",
]

_SERIES_CAP = 10_000


class KummerParams(NamedTuple):
    """Arguments of the confluent series M(alpha, beta, z)."""

    alpha: float
    beta: float
    z: object  # scalar or array


def kummer(p: KummerParams) -> np.ndarray:
    """Confluent hypergeometric M(alpha, beta, z) by direct summation.

    Terminates exactly when alpha is a nonpositive integer (the bound-state
    case); otherwise sums until terms fall below 1e-16 relative.
    """
    alpha, beta = float(p.alpha), float(p.beta)
    if abs(beta - round(beta)) < 1e-12 and round(beta) <= 0:
        raise ValueError(f"beta must not be a nonpositive integer, got {beta!r}")
    z = np.asarray(p.z, dtype=float)
    out = np.ones_like(z)
    term = np.ones_like(z)
    terminating = abs(alpha - round(alpha)) < 1e-12 and round(alpha) <= 0
    n_terms = int(-round(alpha)) if terminating else _SERIES_CAP
    for k in range(n_terms):
        term = term * ((alpha + k) / ((beta + k) * (k + 1.0))) * z
        out = out + term
        if not terminating and np.all(np.abs(term) <= 1e-16 * np.maximum(np.abs(out), 1.0)):
            break
    else:
        if not terminating:
            raise ValueError("confluent series did not converge within the term cap")
    return out


@dataclass(frozen=True)
class RadialMesh:
    """Composite Gauss-Legendre rule on geometrically graded panels of [0, r_max].

    The panel edges accumulate toward the origin so the rho^nu endpoint
    behavior (nu slightly below an integer) is integrated accurately.
    """

    nodes: np.ndarray
    weights: np.ndarray
    r_max: float
    n_panels: int
    points_per_panel: int


def radial_mesh(r_max: float, n_panels: int = 24, points_per_panel: int = 32) -> RadialMesh:
    if r_max <= 0.0:
        raise ValueError(f"r_max must be positive, got {r_max!r}")
    if n_panels < 2 or points_per_panel < 2:
        raise ValueError("need at least 2 panels and 2 points per panel")
    x, w = roots_legendre(points_per_panel)
    edges = np.concatenate(([0.0], np.geomspace(r_max * 1e-8, r_max, n_panels)))
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        nodes.append(a + half * (x + 1.0))
        weights.append(half * w)
    return RadialMesh(
        nodes=np.concatenate(nodes),
        weights=np.concatenate(weights),
        r_max=r_max,
        n_panels=n_panels,
        points_per_panel=points_per_panel,
    )


@dataclass(frozen=True)
class RadialSolution:
    """Bound radial pair (f, g) sampled on a quadrature mesh.

    kappa is the eigenvalue of K = beta*(Sigma.L + 1) carried by the state
    (opposite in sign to the standard Dirac kappa).  f, g are unnormalized;
    `norm` holds integral(f^2 + g^2) and `b` the normalized cross overlap
    integral(2 f g)/norm, positive by the stored sign convention.
    """

    n: int
    j: float
    kappa_sign: int
    kappa: float
    nu: float
    n_tilde: int
    energy: float
    lam: float
    mesh: RadialMesh
    f: np.ndarray
    g: np.ndarray
    lower_phase: int
    norm: float
    b: float
    constants: PhysicalConstants = field(repr=False, default=DEFAULT_CONSTANTS)

    def sample(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate (f, g) at arbitrary radii."""
        f, w = _radial_pair(
            np.asarray(r, dtype=float),
            self.energy,
            self.nu,
            self.n_tilde,
            self.kappa,
            self.lam,
            self.constants.a,
        )
        return f, self.lower_phase * w


def _radial_pair(
    r: np.ndarray, energy: float, nu: float, n_tilde: int, kappa_k: float, lam: float, a: float
) -> tuple[np.ndarray, np.ndarray]:
    """Raw reduced pair (f, w); the dynamical lower channel is i*w."""
    rho = 2.0 * r / lam
    big_lambda = a * lam
    q = (big_lambda + kappa_k) * kummer(KummerParams(-n_tilde, 2.0 * nu + 1.0, rho))
    if n_tilde == 0:
        p = np.zeros_like(rho)
    else:
        p = -n_tilde * kummer(KummerParams(1 - n_tilde, 2.0 * nu + 1.0, rho))
    env = np.where(rho > 0.0, rho, 1.0) ** nu * np.exp(-0.5 * rho)
    env = np.where(rho > 0.0, env, 0.0)
    f = math.sqrt(1.0 + energy) * (p + q) * env
    w = math.sqrt(1.0 - energy) * (p - q) * env
    return f, w


def build_solution(
    n: int,
    j: float,
    kappa_sign: int,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
    mesh: RadialMesh | None = None,
) -> RadialSolution:
    """Construct the bound pair for (n, j, kappa_sign) on a default or given mesh."""
    qn = QuantumNumbers(n=n, j=j, kappa_sign=kappa_sign)
    a = constants.a
    if a == 0.0:
        raise ValueError("no bound states at a = 0")
    energy = sommerfeld_energy(qn, constants)
    kappa_j = j + 0.5
    nu = math.sqrt(kappa_j * kappa_j - a * a)
    lam = 1.0 / math.sqrt(1.0 - energy * energy)
    kappa_k = qn.k_eigenvalue
    if mesh is None:
        mesh = radial_mesh(60.0 * n * lam)
    f, w = _radial_pair(mesh.nodes, energy, nu, qn.n_tilde, kappa_k, lam, a)
    fmax = float(np.abs(f).max())
    tail = max(abs(f[-1]), abs(w[-1]))
    if tail > 1e-8 * fmax:
        raise ValueError(
            f"mesh truncation: boundary amplitude {tail:.3e} exceeds 1e-8 of peak; "
            f"increase r_max (= {mesh.r_max:.3e})"
        )
    norm = float(np.dot(mesh.weights, f * f + w * w))
    b_raw = float(np.dot(mesh.weights, 2.0 * f * w)) / norm
    phase = 1 if b_raw >= 0.0 else -1
    return RadialSolution(
        n=n,
        j=j,
        kappa_sign=kappa_sign,
        kappa=kappa_k,
        nu=nu,
        n_tilde=qn.n_tilde,
        energy=energy,
        lam=lam,
        mesh=mesh,
        f=f,
        g=phase * w,
        lower_phase=phase,
        norm=norm,
        b=abs(b_raw),
        constants=constants,
    )


def normalization(sol: RadialSolution) -> float:
    """Quadrature norm integral(f^2 + g^2) of the stored samples."""
    return float(np.dot(sol.mesh.weights, sol.f * sol.f + sol.g * sol.g))


def b_overlap(sol: RadialSolution) -> float:
    """Normalized cross overlap b = integral(2 f g)/norm; positive by convention."""
    return float(np.dot(sol.mesh.weights, 2.0 * sol.f * sol.g)) / normalization(sol)


def _d2_scalar(energy: float, kappa_abs: float, a: float) -> float:
    return 1.0 + (energy * energy - 1.0) * kappa_abs * kappa_abs / (a * a)


def b_relation_residuals(
    n: int,
    j: float,
    kappa_sign: int,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> dict[str, float]:
    """Residuals of three candidate energy-overlap relations.

    'quadratic'   : |E^2 - (b^2 - 2ab/kappa + 1)|
    'intermediate': |(1 + sqrt(d2)) - kappa*b/a| with d2 the squared-invariant scalar
    'linear'      : |kappa*b/a - (1 - d2)|

    The quadratic and intermediate forms hold only on the zero-node branch;
    the linear form holds on every bound state.
    """
    sol = build_solution(n, j, kappa_sign, constants)
    a = constants.a
    kap = j + 0.5
    e2 = sol.energy * sol.energy
    b = sol.b
    d2 = _d2_scalar(sol.energy, kap, a)
    return {
        "quadratic": abs(e2 - (b * b - 2.0 * a * b / kap + 1.0)),
        "intermediate": abs((1.0 + math.sqrt(max(d2, 0.0))) - kap * b / a),
        "linear": abs(kap * b / a - (1.0 - d2)),
    }


def verify_b_identity(
    n: int,
    j: float,
    kappa_sign: int,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> float:
    """Residual of the quadratic energy-overlap relation E^2 = b^2 - 2ab/kappa + 1."""
    return b_relation_residuals(n, j, kappa_sign, constants)["quadratic"]
