"""Physics layer: units, channels, boundary conditions, radial solutions and boundary determinants.

Dimensionless conventions
-------------------------
Schrodinger / Pauli
    hbar = M = e^2 = 1.  Energies in M e^4, lengths in Bohr radii a = 1/(M e^2).
    Reported Pauli energies exclude the rest mass.
Dirac
    hbar = M = c = 1 after scaling.  Energies in M c^2 (rest mass included),
    lengths in a = 1/(M c alpha).  Coulomb term alpha^2 / rho.

Dirac channel convention: ``k = -(j + 1/2)`` for ``j = l_A + 1/2`` and
``k = +(j + 1/2)`` for ``j = l_A - 1/2``, so the ground state 1S_1/2 is k = -1.
The radial system integrated here is

    psi_A' = [(eps + 1 + alpha^2/rho) psi_B] / alpha - (1 + k)/rho psi_A
    psi_B' = [(1 - eps - alpha^2/rho) psi_A] / alpha - (1 - k)/rho psi_B

and the bag-type wall condition is ``nu psi_A(R) + psi_B(R) = 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from . import oracle
from .oracle import DEFAULT_CONFIG, IntegratorConfig
from .specfun import kummer_m, laguerre_general

__all__ = [
    "Model",
    "UnitSystem",
    "Channel",
    "BoundaryCondition",
    "CavityProblem",
    "RadialPoint",
    "DomainError",
    "schrodinger_closed_form",
    "boundary_fn",
    "boundary_fn_schrodinger",
    "boundary_fn_dirac",
    "boundary_fn_pauli",
    "pauli_effective_bc",
    "quantization_residual_laguerre",
    "dirac_energy_infinite",
    "fine_structure_energy",
    "jl_eigenvalue_sq",
    "jl_identity_residual",
    "schrodinger_energy_infinite",
    "DEFAULT_WINDOWS",
]


class DomainError(ValueError):
    """Input outside the mathematical domain of an evaluator."""


class Model(str, enum.Enum):
    SCHRODINGER = "schrodinger"
    DIRAC = "dirac"
    PAULI = "pauli"


DEFAULT_WINDOWS = {
    Model.SCHRODINGER: (-0.6, 2.0),
    Model.PAULI: (-0.6, 2.0),
    Model.DIRAC: (-1.0, 5.0),
}

_ORBITAL_LETTERS = "spdfghiklmnoqrtuv"


@dataclass(frozen=True)
class UnitSystem:
    model: Model
    alpha: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if self.model is Model.DIRAC:
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ValueError(f"Dirac units need 0 < alpha < 1, got {self.alpha}")
        elif self.alpha is not None:
            raise ValueError("alpha is only meaningful for the Dirac model")

    @property
    def energy_unit(self) -> str:
        return "Mc^2" if self.model is Model.DIRAC else "Me^4"


@dataclass(frozen=True)
class Channel:
    """Angular/spin sector.  Build with :meth:`schrodinger`, :meth:`dirac` or :meth:`pauli`."""

    model: Model
    l: Optional[int] = None
    k: Optional[int] = None
    j_sign: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if self.model is Model.DIRAC:
            if self.k is None or int(self.k) != self.k or self.k == 0:
                raise ValueError(f"Dirac channel needs a nonzero integer k, got {self.k}")
            if self.l is not None or self.j_sign is not None:
                raise ValueError("Dirac channel is labelled by k only")
            return
        if self.l is None or int(self.l) != self.l or self.l < 0:
            raise ValueError(f"l must be a non-negative integer, got {self.l}")
        if self.k is not None:
            raise ValueError("k only applies to the Dirac model")
        if self.model is Model.SCHRODINGER:
            if self.j_sign is not None:
                raise ValueError("the spinless Schrodinger channel has no j")
        else:
            if self.j_sign not in (1, -1):
                raise ValueError(f"Pauli channel needs j_sign = +1 or -1, got {self.j_sign}")
            if self.l == 0 and self.j_sign == -1:
                raise ValueError("l = 0 admits only j = 1/2 (j_sign = +1)")

    @classmethod
    def schrodinger(cls, l: int) -> "Channel":
        return cls(Model.SCHRODINGER, l=l)

    @classmethod
    def dirac(cls, k: int) -> "Channel":
        return cls(Model.DIRAC, k=k)

    @classmethod
    def pauli(cls, l: int, j_sign: int) -> "Channel":
        return cls(Model.PAULI, l=l, j_sign=j_sign)

    @classmethod
    def pauli_from_j(cls, l: int, j: float) -> "Channel":
        if abs(j - (l + 0.5)) < 1e-12:
            return cls.pauli(l, 1)
        if abs(j - (l - 0.5)) < 1e-12:
            return cls.pauli(l, -1)
        raise ValueError(f"j = {j} is not l +- 1/2 for l = {l}")

    @property
    def j(self) -> Optional[float]:
        if self.model is Model.DIRAC:
            return abs(self.k) - 0.5
        if self.model is Model.PAULI:
            return self.l + 0.5 * self.j_sign
        return None

    @property
    def l_a(self) -> int:
        """Orbital angular momentum of the upper (large) component."""
        if self.model is not Model.DIRAC:
            return self.l
        return abs(self.k) - 1 if self.k < 0 else abs(self.k)

    @property
    def l_b(self) -> int:
        if self.model is not Model.DIRAC:
            raise AttributeError("l_b is only defined for Dirac channels")
        return abs(self.k) if self.k < 0 else abs(self.k) - 1

    @property
    def orbital_l(self) -> int:
        return self.l_a

    def principal_label(self, node_count: int) -> int:
        if self.model is Model.DIRAC:
            return node_count + abs(self.k) + (1 if self.k > 0 else 0)
        return node_count + self.l + 1

    def spectroscopic(self, n: Optional[int] = None) -> str:
        """Label such as ``3d``, ``4P3/2`` or ``2S1/2``."""
        prefix = "" if n is None else str(n)
        letter = _ORBITAL_LETTERS[self.orbital_l] if self.orbital_l < len(_ORBITAL_LETTERS) else f"[l={self.orbital_l}]"
        if self.model is Model.SCHRODINGER:
            return prefix + letter
        twice_j = int(round(2 * self.j))
        return f"{prefix}{letter.upper()}{twice_j}/2"

    @property
    def key(self) -> str:
        """Compact machine label used in datasets."""
        if self.model is Model.SCHRODINGER:
            return f"l={self.l}"
        if self.model is Model.DIRAC:
            return f"k={self.k}"
        return f"l={self.l};j={int(round(2 * self.j))}/2"


@dataclass(frozen=True)
class BoundaryCondition:
    """Homogeneous wall condition ``u * f(R) + v * g(R) = 0``.

    Schrodinger/Pauli: ``f = psi``, ``g = psi'`` so ``gamma = u / v``.
    Dirac: ``f = psi_A``, ``g = psi_B`` so ``nu = u / v``.
    Stored normalized with ``u**2 + v**2 = 1`` and ``u > 0`` or ``(u, v) = (0, 1)``.
    """

    u: float
    v: float

    def __post_init__(self):
        u, v = float(self.u), float(self.v)
        if not (math.isfinite(u) and math.isfinite(v)):
            raise ValueError("boundary pair must be finite; use BoundaryCondition.robin(inf)")
        norm = math.hypot(u, v)
        if norm == 0.0:
            raise ValueError("boundary pair (0, 0) is not a condition")
        u, v = u / norm, v / norm
        if u < 0 or (u == 0 and v < 0):
            u, v = -u, -v
        object.__setattr__(self, "u", u + 0.0)
        object.__setattr__(self, "v", v + 0.0)

    @classmethod
    def dirichlet(cls) -> "BoundaryCondition":
        return cls(1.0, 0.0)

    @classmethod
    def neumann(cls) -> "BoundaryCondition":
        return cls(0.0, 1.0)

    @classmethod
    def robin(cls, gamma: float) -> "BoundaryCondition":
        """``gamma * psi(R) + psi'(R) = 0``; ``+-inf`` is Dirichlet."""
        gamma = float(gamma)
        if math.isnan(gamma):
            raise ValueError("gamma is NaN")
        if math.isinf(gamma):
            return cls.dirichlet()
        return cls(gamma, 1.0)

    @classmethod
    def from_nu(cls, nu: float) -> "BoundaryCondition":
        """Dirac wall ``nu * psi_A(R) + psi_B(R) = 0``; ``+-inf`` means psi_A(R) = 0."""
        return cls.robin(nu)

    @classmethod
    def from_angle(cls, theta: float, R: float) -> "BoundaryCondition":
        """Robin condition with ``theta = arctan(gamma * R)``.

        theta = +-pi/2 (to 1e-12) is snapped to the exact Dirichlet pair.
        """
        if abs(abs(theta) - math.pi / 2) <= 1e-12:
            return cls.dirichlet()
        return cls(math.sin(theta), R * math.cos(theta))

    @property
    def gamma(self) -> float:
        if self.v == 0.0:
            return math.inf
        return self.u / self.v

    nu = gamma

    @property
    def is_dirichlet(self) -> bool:
        return self.v == 0.0

    def angle(self, R: float) -> float:
        """arctan(gamma * R) in (-pi/2, pi/2]."""
        if self.v == 0.0:
            return math.pi / 2
        return math.atan(self.gamma * R)

    def shifted(self, delta: float) -> "BoundaryCondition":
        """Condition for ``gamma + delta`` (Dirichlet stays Dirichlet)."""
        return BoundaryCondition(self.u + delta * self.v, self.v)

    def describe(self) -> str:
        if self.is_dirichlet:
            return "dirichlet"
        if self.u == 0.0:
            return "neumann"
        return f"gamma={self.gamma!r}"


@dataclass(frozen=True)
class CavityProblem:
    units: UnitSystem
    channel: Channel
    bc: BoundaryCondition
    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.units.model is not self.channel.model:
            raise ValueError("channel model does not match the unit system")
        if self.units.model is Model.DIRAC and self.units.alpha >= abs(self.channel.k):
            raise DomainError("alpha >= |k| gives degenerate Frobenius exponents (unsupported)")

    @property
    def model(self) -> Model:
        return self.units.model

    def with_radius(self, radius: float) -> "CavityProblem":
        return CavityProblem(self.units, self.channel, self.bc, radius)

    def with_bc(self, bc: BoundaryCondition) -> "CavityProblem":
        return CavityProblem(self.units, self.channel, bc, self.radius)

    def with_channel(self, channel: Channel) -> "CavityProblem":
        return CavityProblem(self.units, channel, self.bc, self.radius)


@dataclass(frozen=True)
class RadialPoint:
    r: float
    psi: Optional[float] = None
    dpsi: Optional[float] = None
    psi_a: Optional[float] = None
    psi_b: Optional[float] = None


# ---------------------------------------------------------------- closed forms

def schrodinger_closed_form(eps: float, l: int, rho: float) -> RadialPoint:
    """Regular bound-type solution psi ~ rho^l M(l+1-n, 2l+2, 2rho/n) exp(-rho/n), n = (-2 eps)^-1/2.

    This is the Laguerre-function solution with the overall constant fixed so
    that psi = rho^l (1 + O(rho)).  Only defined for eps < 0.
    """
    if not eps < 0:
        raise DomainError(f"closed form needs eps < 0, got {eps}")
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}")
    n = 1.0 / math.sqrt(-2.0 * eps)
    x = 2.0 * rho / n
    a, b = l + 1.0 - n, 2.0 * l + 2.0
    m0 = kummer_m(a, b, x)
    m1 = kummer_m(a + 1.0, b + 1.0, x)
    damp = math.exp(-rho / n)
    pl = rho ** l
    psi = pl * m0 * damp
    dpsi = (pl * (2.0 / n) * (a / b) * m1 - pl * m0 / n) * damp
    if l:
        dpsi += l * rho ** (l - 1) * m0 * damp
    return RadialPoint(r=rho, psi=psi, dpsi=dpsi)


def _normalized(u: float, v: float, f: float, g: float) -> float:
    norm = math.hypot(f, g)
    if norm == 0.0:
        raise ArithmeticError("solution vanished identically at the wall")
    return (u * f + v * g) / norm


def _schrodinger_wall(eps: float, l: int, R: float, cfg: IntegratorConfig, engine: str):
    if engine == "closed_form" or (engine == "auto" and eps < 0):
        p = schrodinger_closed_form(eps, l, R)
        return p.psi, p.dpsi
    res = oracle.shoot_schrodinger(eps, l, R, cfg)
    return res.y1, res.y2 / R


def boundary_fn_schrodinger(problem: CavityProblem, eps: float, cfg: IntegratorConfig = DEFAULT_CONFIG,
                            engine: str = "auto") -> float:
    """Normalized determinant (u psi + v psi') / sqrt(psi^2 + psi'^2) at the wall.

    ``engine='auto'`` uses the closed form for eps < 0 and shooting otherwise;
    ``'closed_form'`` or ``'shooting'`` force one path.
    """
    if problem.model is not Model.SCHRODINGER:
        raise ValueError("boundary_fn_schrodinger needs a Schrodinger problem")
    psi, dpsi = _schrodinger_wall(eps, problem.channel.l, problem.radius, cfg, engine)
    return _normalized(problem.bc.u, problem.bc.v, psi, dpsi)


def pauli_effective_bc(channel: Channel, bc: BoundaryCondition, R: float) -> BoundaryCondition:
    """Spin-dependent Robin shift: gamma - l/R for j = l + 1/2, gamma + (l+1)/R for j = l - 1/2."""
    if channel.j_sign == 1:
        return bc.shifted(-channel.l / R)
    return bc.shifted((channel.l + 1) / R)


def boundary_fn_pauli(problem: CavityProblem, eps: float, cfg: IntegratorConfig = DEFAULT_CONFIG,
                      engine: str = "auto") -> float:
    if problem.model is not Model.PAULI:
        raise ValueError("boundary_fn_pauli needs a Pauli problem")
    bc = pauli_effective_bc(problem.channel, problem.bc, problem.radius)
    psi, dpsi = _schrodinger_wall(eps, problem.channel.l, problem.radius, cfg, engine)
    return _normalized(bc.u, bc.v, psi, dpsi)


def boundary_fn_dirac(problem: CavityProblem, eps: float, cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """Normalized determinant (u psi_A + v psi_B) / |(psi_A, psi_B)| of the regular solution."""
    if problem.model is not Model.DIRAC:
        raise ValueError("boundary_fn_dirac needs a Dirac problem")
    k, alpha = problem.channel.k, problem.units.alpha
    if alpha >= abs(k):
        raise DomainError("alpha >= |k| is not supported")
    res = oracle.shoot_dirac(eps, k, alpha, problem.radius, cfg)
    return _normalized(problem.bc.u, problem.bc.v, res.y1, res.y2)


def boundary_fn(problem: CavityProblem, eps: float, cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    if problem.model is Model.SCHRODINGER:
        return boundary_fn_schrodinger(problem, eps, cfg)
    if problem.model is Model.PAULI:
        return boundary_fn_pauli(problem, eps, cfg)
    return boundary_fn_dirac(problem, eps, cfg)


def wall_condition(problem: CavityProblem) -> BoundaryCondition:
    """The (u, v) pair actually applied to the radial solution."""
    if problem.model is Model.PAULI:
        return pauli_effective_bc(problem.channel, problem.bc, problem.radius)
    return problem.bc


def wall_phase(problem: CavityProblem) -> float:
    """Pruefer angle in (0, pi] at which the wall condition holds.

    Matches the angle tracked by :mod:`cavityatom.oracle`: for Schrodinger it
    is the angle of (rho psi, psi + rho psi'), for Dirac that of (psi_A, psi_B).
    """
    bc = wall_condition(problem)
    u, v = bc.u, bc.v
    if problem.model is not Model.DIRAC:
        # u psi + v psi' = 0  <=>  (u - v/R) U + v U' = 0 with U = rho psi
        u = u - v / problem.radius
    if v == 0.0:
        return math.pi
    if v > 0:
        return math.atan2(v, -u)
    return math.atan2(-v, u)


def quantization_residual_laguerre(problem: CavityProblem, n: float) -> float:
    """Laguerre-function form of the Robin condition as a function of n (E = -1/(2 n^2)).

    (gamma n/2 - 1/2 + l n/(2R)) L^{2l+1}_{n-l-1}(2R/n) - L^{2l+2}_{n-l-2}(2R/n), multiplied
    through by v so that the Dirichlet case (v = 0) reduces to u n/2 L^{2l+1}_{n-l-1}.
    """
    if problem.model is Model.DIRAC:
        raise ValueError("the Laguerre quantization condition is non-relativistic")
    l = problem.channel.l
    if not n > l:
        raise DomainError(f"need n > l, got n={n}, l={l}")
    bc = wall_condition(problem)
    R = problem.radius
    x = 2.0 * R / n
    lower = laguerre_general(n - l - 1.0, 2.0 * l + 1.0, x)
    upper = laguerre_general(n - l - 2.0, 2.0 * l + 2.0, x)
    return (bc.u * n / 2.0 + bc.v * (l * n / (2.0 * R) - 0.5)) * lower - bc.v * upper


# ------------------------------------------------------ infinite-volume formulas

def schrodinger_energy_infinite(n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return -0.5 / (n * n)


def _check_dirac_quantum_numbers(n: int, k: int, alpha: float, strict: bool = True):
    if int(n) != n or int(k) != k or k == 0:
        raise ValueError(f"n and k must be integers with k != 0 (got n={n}, k={k})")
    if not 0.0 <= alpha < abs(k):
        raise DomainError(f"need 0 <= alpha < |k|, got alpha={alpha}, k={k}")
    if strict:
        ok = n >= abs(k) if k < 0 else n > abs(k)
    else:
        ok = n >= abs(k)
    if not ok:
        raise ValueError(f"no bound state with n={n}, k={k}")


def dirac_energy_infinite(n: int, k: int, alpha: float) -> float:
    """Coulomb-Dirac bound-state energy in units of Mc^2."""
    _check_dirac_quantum_numbers(n, k, alpha)
    d = n - abs(k) + math.sqrt(k * k - alpha * alpha)
    return 1.0 / math.sqrt(1.0 + alpha * alpha / (d * d))


def fine_structure_energy(n: int, j: float, alpha: float) -> float:
    """Order-alpha^4 expansion of the Dirac energy, in units of Mc^2."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    if abs(2 * j - round(2 * j)) > 1e-12 or round(2 * j) % 2 != 1 or j < 0.5:
        raise ValueError(f"j must be a positive half-integer, got {j}")
    if j + 0.5 > n:
        raise ValueError(f"need j + 1/2 <= n (got n={n}, j={j})")
    a2 = alpha * alpha
    return 1.0 - a2 / (2 * n * n) - a2 * a2 / (2 * n ** 3) * (1.0 / (j + 0.5) - 3.0 / (4 * n))


def jl_eigenvalue_sq(n: int, k: int, alpha: float) -> float:
    """Eigenvalue a^2 of the squared Johnson-Lippmann operator on |n j j3 k>.

    Depends on |k| only; accepts any n >= |k| so the unpaired top state
    (n = |k|) evaluates to exactly zero.
    """
    _check_dirac_quantum_numbers(n, k, alpha, strict=False)
    m = n - abs(k)
    s = math.sqrt(k * k - alpha * alpha)
    d = m + s
    # alpha^2 (1 - k^2 / (d^2 + alpha^2)) with d^2 + alpha^2 - k^2 = m (m + 2 s): zero exactly at m = 0
    return alpha * alpha * m * (m + 2.0 * s) / (d * d + alpha * alpha)


def jl_identity_residual(n: int, k: int, alpha: float) -> float:
    """|a^2 - (k^2 (E^2 - 1) + alpha^2)| with E from the Dirac energy formula."""
    _check_dirac_quantum_numbers(n, k, alpha, strict=False)
    d = n - abs(k) + math.sqrt(k * k - alpha * alpha)
    e = 1.0 / math.sqrt(1.0 + alpha * alpha / (d * d))
    return abs(jl_eigenvalue_sq(n, k, alpha) - (k * k * (e * e - 1.0) + alpha * alpha))
