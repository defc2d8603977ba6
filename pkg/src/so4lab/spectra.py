"""Closed-form level structure of the Dirac-Coulomb problem.

Natural units M = hbar = c = 1 throughout; `PhysicalConstants.a` is the
dimensionless coupling and `electron_rest_frequency` converts energies in
units of M to Hz at the reporting boundary only.  The monopolar family
generalises the point-charge levels by replacing kappa = j + 1/2 with
sqrt((j' + 1/2)^2 - q^2) and decoupling the radial count from j'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PhysicalConstants",
    "DEFAULT_CONSTANTS",
    "QuantumNumbers",
    "MonopoleQuantumNumbers",
    "sommerfeld_energy",
    "bohr_energy",
    "degeneracy",
    "monopolar_kappa",
    "monopolar_energy",
    "depression",
    "to_frequency",
    "enumerate_states",
]

_L_LETTERS = "SPDFGHIKLMN"


def _check_half_integer(value: float, name: str) -> None:
    if abs(2.0 * value - round(2.0 * value)) > 1e-12:
        raise ValueError(f"{name} must be a half-integer, got {value!r}")


@dataclass(frozen=True)
class PhysicalConstants:
    """Coupling strength and the single unit-conversion scale.

    a = 0 is admitted so the free field can be used as a diagnostic; the
    supercritical regime a >= 1 is rejected because sqrt(kappa^2 - a^2)
    turns imaginary for the lowest channel.
    """

    a: float = 7.2973525693e-3
    electron_rest_frequency: float = 1.2355899e20

    def __post_init__(self) -> None:
        if not 0.0 <= self.a < 1.0:
            raise ValueError(f"coupling a must lie in [0, 1), got {self.a!r}")
        if self.electron_rest_frequency <= 0.0:
            raise ValueError("electron_rest_frequency must be positive")


DEFAULT_CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class QuantumNumbers:
    """Bound-state labels (n, j, kappa_sign) for the point-charge problem.

    kappa_sign is the sign of the Dirac quantum number kappa = +-(j + 1/2):
    -1 selects l = j - 1/2 and +1 selects l = j + 1/2.  At n = j + 1/2 the
    radial count vanishes and only kappa_sign = -1 exists.
    """

    n: int
    j: float
    kappa_sign: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n!r}")
        _check_half_integer(self.j, "j")
        if self.j < 0.5 or round(2.0 * self.j) % 2 != 1:
            raise ValueError(f"j must be one of 1/2, 3/2, ..., got {self.j!r}")
        if self.kappa_sign not in (-1, 1):
            raise ValueError(f"kappa_sign must be -1 or +1, got {self.kappa_sign!r}")
        if self.j + 0.5 > self.n:
            raise ValueError(f"j = {self.j} exceeds n - 1/2 for n = {self.n}")
        if self.n == int(round(self.j + 0.5)) and self.kappa_sign != -1:
            raise ValueError(
                f"n = j + 1/2 = {self.n} admits only kappa_sign = -1"
            )

    @property
    def kappa_abs(self) -> float:
        return self.j + 0.5

    @property
    def kappa(self) -> float:
        """Signed Dirac kappa in the standard convention: kappa_sign*(j+1/2)."""
        return self.kappa_sign * (self.j + 0.5)

    @property
    def k_eigenvalue(self) -> float:
        """Eigenvalue of K = beta*(Sigma.L + 1); opposite sign to kappa."""
        return -self.kappa

    @property
    def l(self) -> int:
        return int(round(self.j + 0.5 * self.kappa_sign))

    @property
    def n_tilde(self) -> int:
        """Radial count n - (j + 1/2); zero for the circular states."""
        return self.n - int(round(self.j + 0.5))

    def spectroscopic(self) -> str:
        twice_j = int(round(2.0 * self.j))
        frac = f"{twice_j}/2"
        return f"{self.n}{_L_LETTERS[self.l]}{frac}"


@dataclass(frozen=True)
class MonopoleQuantumNumbers:
    """Labels (n_radial, j_prime, q) for the charge-monopole bound family.

    q is the monopole charge quantum (half-integer, may be 0); the angular
    family requires j' + 1/2 > |q| so the effective kappa stays real and
    positive.
    """

    n_radial: int
    j_prime: float
    q: float

    def __post_init__(self) -> None:
        if self.n_radial < 0:
            raise ValueError(f"n_radial must be >= 0, got {self.n_radial!r}")
        _check_half_integer(self.j_prime, "j_prime")
        _check_half_integer(self.q, "q")
        if self.j_prime < 0.0:
            raise ValueError(f"j_prime must be >= 0, got {self.j_prime!r}")
        if not self.j_prime + 0.5 > abs(self.q):
            raise ValueError(
                f"j_prime + 1/2 = {self.j_prime + 0.5} must exceed |q| = {abs(self.q)}"
            )


def sommerfeld_energy(qn: QuantumNumbers, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Exact point-charge level E/M; depends on (n, j) only."""
    a = constants.a
    kappa = qn.j + 0.5
    nu = math.sqrt(kappa * kappa - a * a)
    n_tilde = qn.n - kappa
    return 1.0 / math.sqrt(1.0 + (a / (n_tilde + nu)) ** 2)


def bohr_energy(n: int, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Leading nonrelativistic binding -a^2/(2 n^2) in units of M."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    return -constants.a ** 2 / (2.0 * n * n)


def degeneracy(n: int, j: float) -> int:
    """Multiplicity of the level (n, j): both kappa signs times (2j+1),
    halved at the circular boundary n = j + 1/2 where only one sign exists."""
    qn = QuantumNumbers(n=n, j=j, kappa_sign=-1)
    two_j_plus_1 = int(round(2.0 * j + 1.0))
    if qn.n_tilde == 0:
        return two_j_plus_1
    return 2 * two_j_plus_1


def monopolar_kappa(j_prime: float, q: float) -> float:
    """Effective angular constant sqrt((j'+1/2)^2 - q^2) of the monopolar family."""
    _check_half_integer(j_prime, "j_prime")
    _check_half_integer(q, "q")
    top = (j_prime + 0.5) ** 2 - q * q
    if top <= 0.0:
        raise ValueError(
            f"j_prime + 1/2 = {j_prime + 0.5} must exceed |q| = {abs(q)}"
        )
    return math.sqrt(top)


def monopolar_energy(
    mqn: MonopoleQuantumNumbers, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """Level E/M with kappa replaced by the monopolar effective constant."""
    a = constants.a
    kap = monopolar_kappa(mqn.j_prime, mqn.q)
    nu = math.sqrt(kap * kap - a * a)
    return 1.0 / math.sqrt(1.0 + (a / (mqn.n_radial + nu)) ** 2)


def depression(
    n: int, j: float, q: float, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """Dimensionless downward shift E(q=0) - E(q) of the level (n, j).

    Pairs the point-charge level with the monopolar one at j' = j and
    n_radial = n - (j + 1/2), so q -> 0 reduces exactly to zero shift.
    """
    qn = QuantumNumbers(n=n, j=j, kappa_sign=-1)
    mqn = MonopoleQuantumNumbers(n_radial=qn.n_tilde, j_prime=j, q=q)
    return sommerfeld_energy(qn, constants) - monopolar_energy(mqn, constants)


def to_frequency(energy_in_m: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Convert an energy expressed in units of M to Hz."""
    return energy_in_m * constants.electron_rest_frequency


def enumerate_states(n_max: int, j_filter: float | None = None) -> list[QuantumNumbers]:
    """All bound labels with n <= n_max, ordered by (n, j, l).

    Within a fixed (n, j) the kappa_sign = -1 member (lower l) comes first.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max!r}")
    out: list[QuantumNumbers] = []
    for n in range(1, n_max + 1):
        two_j = 1
        while (two_j + 1) // 2 <= n - 0 and (two_j / 2.0) + 0.5 <= n:
            j = two_j / 2.0
            if j_filter is None or abs(j - j_filter) < 1e-12:
                for sign in (-1, 1):
                    if n == int(round(j + 0.5)) and sign == 1:
                        continue
                    out.append(QuantumNumbers(n=n, j=j, kappa_sign=sign))
            two_j += 2
    out.sort(key=lambda q: (q.n, q.j, q.l))
    return out
