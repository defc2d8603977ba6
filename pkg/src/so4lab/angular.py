"""Spinor spherical harmonics and the fixed-(j, m_j) angular algebra.

The two-component harmonics phi_A (orbital l = j - 1/2) and phi_B
(l = j + 1/2) are built from scalar harmonics with Clebsch-Gordan
coefficients in closed form.  A fixed product quadrature, Gauss-Legendre
in cos(theta) times a uniform phi grid, backs the numerical identity
checks; it is exact for the polynomial integrands that appear here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "AngularSector",
    "TwoSpinorField",
    "SphereQuadrature",
    "default_quadrature",
    "spherical_harmonic",
    "phi_A",
    "phi_B",
    "phi_A_field",
    "phi_B_field",
    "sigma_dot_rhat_matrix",
    "sigma_dot_rhat_residual",
    "sigma_dot_L_eigenvalue",
    "j_ladder_element",
]


def _legendre_normalized(l: int, m: int, x: np.ndarray) -> np.ndarray:
    """Fully normalized associated Legendre with Condon-Shortley phase.

    Returns Pbar_lm(x) such that Y_lm = Pbar_lm(cos theta) * exp(i m phi),
    for m >= 0.  Stable upward recurrence in l at fixed m.
    """
    s = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    pmm = np.full_like(x, math.sqrt(1.0 / (4.0 * math.pi)))
    for k in range(1, m + 1):
        pmm = -math.sqrt((2.0 * k + 1.0) / (2.0 * k)) * s * pmm
    if l == m:
        return pmm
    pm1 = math.sqrt(2.0 * m + 3.0) * x * pmm
    if l == m + 1:
        return pm1
    for ll in range(m + 2, l + 1):
        c0 = math.sqrt((4.0 * ll * ll - 1.0) / (ll * ll - m * m))
        c1 = math.sqrt(((ll - 1.0) ** 2 - m * m) / (4.0 * (ll - 1.0) ** 2 - 1.0))
        pm1, pmm = c0 * (x * pm1 - c1 * pmm), pm1
    return pm1


def spherical_harmonic(l: int, m: int, theta, phi) -> np.ndarray:
    """Scalar Y_lm(theta, phi), Condon-Shortley convention, broadcastable."""
    if l < 0:
        raise ValueError(f"l must be >= 0, got {l!r}")
    if abs(m) > l:
        raise ValueError(f"|m| = {abs(m)} exceeds l = {l}")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ma = abs(m)
    pbar = _legendre_normalized(l, ma, np.cos(theta))
    y = pbar * np.exp(1j * ma * phi)
    if m < 0:
        y = (-1.0) ** ma * np.conj(y)
    return y


@dataclass(frozen=True)
class AngularSector:
    """A single (j, m_j) angular channel; l_A = j - 1/2, l_B = j + 1/2."""

    j: float
    m_j: float

    def __post_init__(self) -> None:
        for name, v in (("j", self.j), ("m_j", self.m_j)):
            if abs(2.0 * v - round(2.0 * v)) > 1e-12:
                raise ValueError(f"{name} must be a half-integer, got {v!r}")
        if self.j < 0.5 or round(2.0 * self.j) % 2 != 1:
            raise ValueError(f"j must be one of 1/2, 3/2, ..., got {self.j!r}")
        if abs(self.m_j) > self.j + 1e-12:
            raise ValueError(f"|m_j| = {abs(self.m_j)} exceeds j = {self.j}")
        if abs((self.j - self.m_j) - round(self.j - self.m_j)) > 1e-12:
            raise ValueError(f"j - m_j must be an integer, got j={self.j}, m_j={self.m_j}")

    @property
    def l_A(self) -> int:
        return int(round(self.j - 0.5))

    @property
    def l_B(self) -> int:
        return int(round(self.j + 0.5))


def phi_A(sector: AngularSector, theta, phi) -> np.ndarray:
    """Upper-type spinor harmonic, shape (2,) + broadcast shape.

    Components carry m = m_j - 1/2 and m + 1; a vanishing coefficient
    suppresses the harmonic entirely so edge m_j values never request an
    out-of-range Y.
    """
    l = sector.l_A
    m = int(round(sector.m_j - 0.5))
    norm = math.sqrt(2.0 * l + 1.0)
    theta = np.asarray(theta, dtype=float)
    phi_arr = np.asarray(phi, dtype=float)
    shape = np.broadcast_shapes(theta.shape, phi_arr.shape)
    out = np.zeros((2,) + shape, dtype=complex)
    c0 = l + m + 1
    c1 = l - m
    if c0 > 0:
        out[0] = math.sqrt(c0) / norm * spherical_harmonic(l, m, theta, phi_arr)
    if c1 > 0:
        out[1] = math.sqrt(c1) / norm * spherical_harmonic(l, m + 1, theta, phi_arr)
    return out


def phi_B(sector: AngularSector, theta, phi) -> np.ndarray:
    """Lower-type spinor harmonic built on l_B = l_A + 1; both coefficients
    are nonzero for every admissible m_j."""
    l = sector.l_A
    m = int(round(sector.m_j - 0.5))
    norm = math.sqrt(2.0 * l + 3.0)
    theta = np.asarray(theta, dtype=float)
    phi_arr = np.asarray(phi, dtype=float)
    shape = np.broadcast_shapes(theta.shape, phi_arr.shape)
    out = np.zeros((2,) + shape, dtype=complex)
    out[0] = -math.sqrt(l - m + 1.0) / norm * spherical_harmonic(l + 1, m, theta, phi_arr)
    out[1] = math.sqrt(l + m + 2.0) / norm * spherical_harmonic(l + 1, m + 1, theta, phi_arr)
    return out


@dataclass(frozen=True)
class SphereQuadrature:
    """Product rule: Gauss-Legendre nodes in cos(theta) x uniform phi."""

    theta: np.ndarray
    theta_weights: np.ndarray
    phi: np.ndarray
    phi_weight: float

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.theta, self.phi, indexing="ij")

    def integrate(self, values: np.ndarray):
        """Integrate samples laid out on mesh(); last two axes are (theta, phi)."""
        v = np.asarray(values)
        s = np.tensordot(v, self.theta_weights, axes=([-2], [0]))
        return s.sum(axis=-1) * self.phi_weight


@lru_cache(maxsize=4)
def default_quadrature(n_theta: int = 64, n_phi: int = 128) -> SphereQuadrature:
    x, w = leggauss(n_theta)
    theta = np.arccos(x[::-1])
    return SphereQuadrature(
        theta=theta,
        theta_weights=w[::-1].copy(),
        phi=np.arange(n_phi) * (2.0 * math.pi / n_phi),
        phi_weight=2.0 * math.pi / n_phi,
    )


@dataclass(frozen=True)
class TwoSpinorField:
    """A two-component field on the sphere with a vectorized evaluator."""

    sector: AngularSector
    evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray]
    label: str = ""

    def norm_on_sphere(self, quad: SphereQuadrature | None = None) -> float:
        quad = quad or default_quadrature()
        th, ph = quad.mesh()
        v = self.evaluate(th, ph)
        dens = (np.abs(v) ** 2).sum(axis=0)
        return math.sqrt(float(quad.integrate(dens).real))

    def inner(self, other: "TwoSpinorField", quad: SphereQuadrature | None = None) -> complex:
        quad = quad or default_quadrature()
        th, ph = quad.mesh()
        a = self.evaluate(th, ph)
        b = other.evaluate(th, ph)
        return complex(quad.integrate((np.conj(a) * b).sum(axis=0)))


def phi_A_field(sector: AngularSector) -> TwoSpinorField:
    return TwoSpinorField(sector, lambda th, ph: phi_A(sector, th, ph), label="phi_A")


def phi_B_field(sector: AngularSector) -> TwoSpinorField:
    return TwoSpinorField(sector, lambda th, ph: phi_B(sector, th, ph), label="phi_B")


def sigma_dot_rhat_matrix(theta, phi) -> np.ndarray:
    """Pointwise 2x2 matrix sigma.rhat, shape (2, 2) + broadcast shape."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    shape = np.broadcast_shapes(theta.shape, phi.shape)
    out = np.zeros((2, 2) + shape, dtype=complex)
    st, ct = np.sin(theta), np.cos(theta)
    out[0, 0] = ct
    out[0, 1] = st * np.exp(-1j * phi)
    out[1, 0] = st * np.exp(1j * phi)
    out[1, 1] = -ct
    return out


def sigma_dot_rhat_residual(sector: AngularSector, quad: SphereQuadrature | None = None) -> float:
    """Max pointwise violation of sigma.rhat phi_A = -phi_B (and A <-> B)."""
    quad = quad or default_quadrature()
    th, ph = quad.mesh()
    fa = phi_A(sector, th, ph)
    fb = phi_B(sector, th, ph)
    srm = sigma_dot_rhat_matrix(th, ph)
    sa = np.einsum("ij...,j...->i...", srm, fa)
    sb = np.einsum("ij...,j...->i...", srm, fb)
    return float(max(np.abs(sa + fb).max(), np.abs(sb + fa).max()))


def sigma_dot_L_eigenvalue(sector: AngularSector, channel: str) -> float:
    """Exact sigma.L eigenvalue of the channel: l_A for 'A', -(j + 3/2) for 'B'."""
    if channel == "A":
        return float(sector.l_A)
    if channel == "B":
        return -(sector.j + 1.5)
    raise ValueError(f"channel must be 'A' or 'B', got {channel!r}")


def j_ladder_element(j: float, m_j: float, direction) -> float:
    """Matrix element <j, m_j +- 1| J_+- |j, m_j>; zero outside the multiplet."""
    if direction in ("+", +1):
        d = 1.0
    elif direction in ("-", -1):
        d = -1.0
    else:
        raise ValueError(f"direction must be '+'/'-' or +-1, got {direction!r}")
    target = m_j + d
    if abs(target) > j + 1e-12:
        return 0.0
    val = j * (j + 1.0) - m_j * (m_j + d)
    return math.sqrt(max(val, 0.0))
