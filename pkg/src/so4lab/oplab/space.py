"""Uniform radial lattice and the four-channel sector space.

Channel order is fixed package-wide as (uA, uB, lA, lB): upper/lower
spinor blocks, each split into the A (l = j - 1/2) and B (l = j + 1/2)
angular types.  A sector-space vector stacks, for each m_j in m_list,
four length-N radial arrays in that order; the inner product carries the
lattice weight h.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = ["CHANNELS", "RadialGrid", "SectorSpace", "single_m", "full_multiplet"]

CHANNELS = ("uA", "uB", "lA", "lB")


@dataclass(frozen=True)
class RadialGrid:
    """N uniformly spaced nodes on (0, r_max], Dirichlet closure at both ends.

    The spacing is h = (r_max - r_min)/(N - 1) and the invariant r_min <= h
    keeps the first node within one spacing of the origin.  The `uniform`
    factory picks r_min = h, i.e. nodes at (i+1) h with h = r_max/N; with
    that choice the one-sided closure at the origin is exact for grid
    functions linear in r, which is what second-order convergence of the
    analytic-residual check requires.
    """

    n_points: int
    r_max: float
    r_min: float

    def __post_init__(self) -> None:
        if self.n_points < 4:
            raise ValueError(f"n_points must be >= 4, got {self.n_points!r}")
        if not 0.0 < self.r_min < self.r_max:
            raise ValueError("need 0 < r_min < r_max")
        if self.r_min > self.h * (1.0 + 1e-12):
            raise ValueError(
                f"r_min = {self.r_min!r} exceeds the spacing h = {self.h!r}"
            )

    @classmethod
    def uniform(cls, n_points: int, r_max: float) -> "RadialGrid":
        h = r_max / n_points
        return cls(n_points=n_points, r_max=r_max, r_min=h)

    @property
    def h(self) -> float:
        return (self.r_max - self.r_min) / (self.n_points - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        r = self.r_min + self.h * np.arange(self.n_points)
        r.setflags(write=False)
        return r

    def refine(self) -> "RadialGrid":
        """Halved spacing at the same r_max (node count doubled)."""
        return RadialGrid.uniform(2 * self.n_points, self.r_max)


@dataclass(frozen=True)
class SectorSpace:
    """Discretized fixed-j sector spanning the m_j values in m_list."""

    j: float
    m_list: tuple[float, ...]
    grid: RadialGrid

    def __post_init__(self) -> None:
        if abs(2.0 * self.j - round(2.0 * self.j)) > 1e-12 or round(2.0 * self.j) % 2 != 1:
            raise ValueError(f"j must be half-integral (1/2, 3/2, ...), got {self.j!r}")
        if len(self.m_list) == 0:
            raise ValueError("m_list must be nonempty")
        if len(set(self.m_list)) != len(self.m_list):
            raise ValueError("m_list entries must be distinct")
        for m in self.m_list:
            if abs(m) > self.j + 1e-12 or abs((self.j - m) - round(self.j - m)) > 1e-12:
                raise ValueError(f"m_j = {m!r} is not in the j = {self.j} multiplet")

    @property
    def kappa_abs(self) -> float:
        return self.j + 0.5

    @property
    def n_radial(self) -> int:
        return self.grid.n_points

    @property
    def n_m(self) -> int:
        return len(self.m_list)

    @property
    def dim(self) -> int:
        return 4 * self.grid.n_points * len(self.m_list)

    @property
    def is_full_multiplet(self) -> bool:
        return len(self.m_list) == int(round(2.0 * self.j + 1.0))

    def m_index(self, m_j: float) -> int:
        for i, m in enumerate(self.m_list):
            if abs(m - m_j) < 1e-12:
                return i
        raise ValueError(f"m_j = {m_j!r} not in m_list")

    def channel_slice(self, channel: str, m_index: int = 0) -> slice:
        """Index range of one radial channel inside the stacked vector."""
        n = self.grid.n_points
        c = CHANNELS.index(channel)
        base = 4 * n * m_index
        return slice(base + c * n, base + (c + 1) * n)

    def block_channels(self, k_branch: int) -> tuple[str, str]:
        """(upper, lower) channel pair coupled in the K-eigenvalue branch.

        k_branch = +1 is the K = +(j+1/2) branch (uA, lB); k_branch = -1
        is K = -(j+1/2) (uB, lA).
        """
        if k_branch == 1:
            return ("uA", "lB")
        if k_branch == -1:
            return ("uB", "lA")
        raise ValueError(f"k_branch must be +-1, got {k_branch!r}")

    def embed_block(self, upper: np.ndarray, lower: np.ndarray, k_branch: int, m_index: int = 0) -> np.ndarray:
        """Lift a (upper, lower) radial pair of one K branch into a full vector."""
        up_ch, lo_ch = self.block_channels(k_branch)
        v = np.zeros(self.dim, dtype=np.result_type(upper, lower, np.complex128))
        v[self.channel_slice(up_ch, m_index)] = upper
        v[self.channel_slice(lo_ch, m_index)] = lower
        return v

    def inner(self, x: np.ndarray, y: np.ndarray) -> complex:
        """h-weighted inner product <x, y>."""
        return complex(self.grid.h * np.vdot(x, y))

    def norm(self, x: np.ndarray) -> float:
        return float(np.sqrt(self.grid.h) * np.linalg.norm(x))


def single_m(j: float, grid: RadialGrid, m_j: float | None = None) -> SectorSpace:
    """One-m_j sector; defaults to the highest weight m_j = j."""
    return SectorSpace(j=j, m_list=(j if m_j is None else m_j,), grid=grid)


def full_multiplet(j: float, grid: RadialGrid) -> SectorSpace:
    """Sector carrying every m_j = -j ... j, as SO(4) assembly requires."""
    two_j = int(round(2.0 * j))
    m_list = tuple(-j + k for k in range(two_j + 1))
    return SectorSpace(j=j, m_list=m_list, grid=grid)
