"""Accidental-symmetry diagnostics.

* Runge-Lenz raising (l -> l+1) and double raising (l -> l+2) of a radial
  Schrodinger wavefunction, with derivatives taken through the radial
  equation rather than by differencing.
* Boundary residuals telling whether the raised state still satisfies the
  wall condition, i.e. whether it stays in the domain of the Hamiltonian.
* Closed-form predictions of the radii and Robin parameters at which
  remnant degeneracies survive (Schrodinger and Pauli).
* The Dirac counterpart: the nu values that would be needed for the
  Johnson-Lippmann partner to obey the bag condition, and a numeric check
  that the k / -k pair is nevertheless split in a finite cavity.

All quantities are dimensionless (hbar = M = e^2 = 1 for the non-relativistic
models; Dirac energies in Mc^2, lengths in Bohr radii).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np

from .eigensolve import EnergyLevel, eigenfunction, scan_levels
from .oracle import DEFAULT_CONFIG, IntegratorConfig, Trajectory
from .radial import (
    BoundaryCondition,
    CavityProblem,
    Channel,
    DomainError,
    Model,
    UnitSystem,
)

__all__ = [
    "RaisedState",
    "DegeneracyPrediction",
    "ImpossibleDegeneracy",
    "runge_lenz_raise",
    "runge_lenz_raise2",
    "rl_boundary_residual_closed_form",
    "rl_boundary_residual_numeric",
    "rl_boundary_scale",
    "reentry_residual",
    "predict_degeneracy_schrodinger",
    "predict_degeneracy_pauli",
    "dirac_nu_condition",
    "DiracLifting",
    "verify_dirac_lifting",
]


@dataclass
class RaisedState:
    """chi and chi' sampled on the grid of the source wavefunction."""

    rho: np.ndarray
    chi: np.ndarray
    dchi: np.ndarray
    l: int  # channel of chi

    @property
    def radius(self) -> float:
        return float(self.rho[-1])

    def robin_residual(self, gamma: float) -> float:
        """gamma chi(R) + chi'(R); for gamma = +-inf the Dirichlet value chi(R)."""
        if math.isinf(gamma):
            return float(self.chi[-1])
        return float(gamma * self.chi[-1] + self.dchi[-1])

    def outer_scale(self, gamma: float) -> float:
        """Size of the boundary combination on [R/2, R], used to normalize residuals."""
        outer = self.rho >= 0.5 * self.radius
        chi = np.abs(self.chi[outer]).max()
        if math.isinf(gamma):
            return float(chi)
        return float(max(abs(gamma) * chi, np.abs(self.dchi[outer]).max()))


def _psi_and_derivs(traj: Trajectory, l: int, eps: float):
    rho = traj.rho
    psi = traj.y1
    dpsi = traj.y2 / rho
    L = l * (l + 1)
    d2psi = -2.0 * dpsi / rho + (L / rho ** 2 - 2.0 / rho - 2.0 * eps) * psi
    return rho, psi, dpsi, d2psi


def _check_source(l: int, eps: float):
    if l < 0 or int(l) != l:
        raise ValueError(f"l must be a non-negative integer, got {l}")
    if not math.isfinite(eps):
        raise ValueError("energy must be finite")


def runge_lenz_raise(psi: Trajectory, l: int, eps: float) -> RaisedState:
    """chi_{l+1} = (l+1) psi' + (1 - l(l+1)/rho) psi, and its derivative.

    ``psi`` holds psi in ``y1`` and rho psi' in ``y2`` (Schrodinger layout
    of :mod:`cavityatom.oracle`).
    """
    _check_source(l, eps)
    rho, f, df, d2f = _psi_and_derivs(psi, l, eps)
    L = l * (l + 1)
    chi = (l + 1) * df + (1.0 - L / rho) * f
    dchi = (l + 1) * d2f + (L / rho ** 2) * f + (1.0 - L / rho) * df
    return RaisedState(rho, chi, dchi, l + 1)


def runge_lenz_raise2(psi: Trajectory, l: int, eps: float) -> RaisedState:
    """Double raising l -> l+2 of the top-m component.

    chi = A psi' + B psi with P = (l+1)(l+2),
    A = (2l+3)(1 - P/rho),  B = P (l(2l+3)/rho^2 - 3/rho - 2 eps) + 1 - l(l+1)/rho.
    """
    _check_source(l, eps)
    rho, f, df, d2f = _psi_and_derivs(psi, l, eps)
    P = (l + 1) * (l + 2)
    L = l * (l + 1)
    c = 2 * l + 3
    A = c * (1.0 - P / rho)
    B = P * (l * c / rho ** 2 - 3.0 / rho - 2.0 * eps) + 1.0 - L / rho
    dA = c * P / rho ** 2
    dB = P * (-2.0 * l * c / rho ** 3 + 3.0 / rho ** 2) + L / rho ** 2
    chi = A * df + B * f
    dchi = dA * df + A * d2f + dB * f + B * df
    return RaisedState(rho, chi, dchi, l + 2)


def rl_boundary_residual_closed_form(problem: CavityProblem, eps: float, psi_R: float) -> float:
    """Predicted gamma chi_{l+1}(R) + chi'_{l+1}(R) for an eigenstate with psi(R) = ``psi_R``.

    (l+1) [-gamma (gamma - 2/R) + l(l+2)/R^2 - 2/R - 2 eps] psi(R).  Only
    the Robin condition on psi itself enters, so it holds for any finite gamma.
    """
    if problem.model is not Model.SCHRODINGER:
        raise ValueError("the Runge-Lenz residual is defined for Schrodinger channels")
    if problem.bc.is_dirichlet:
        raise DomainError("Dirichlet wall: use the chi(R) variant (RaisedState.robin_residual(inf))")
    g = problem.bc.gamma
    R = problem.radius
    l = problem.channel.l
    return (l + 1) * (-g * (g - 2.0 / R) + l * (l + 2) / R ** 2 - 2.0 / R - 2.0 * eps) * psi_R


def rl_boundary_scale(problem: CavityProblem, eps: float, psi_R: float) -> float:
    """Magnitude of the individual terms of the closed-form residual (for relative comparisons)."""
    g = problem.bc.gamma
    R = problem.radius
    l = problem.channel.l
    terms = abs(g * (g - 2.0 / R)) + l * (l + 2) / R ** 2 + 2.0 / R + 2.0 * abs(eps)
    return (l + 1) * terms * abs(psi_R)


def rl_boundary_residual_numeric(problem: CavityProblem, level: EnergyLevel,
                                 cfg: IntegratorConfig = DEFAULT_CONFIG) -> Tuple[float, float]:
    """(numeric residual, psi(R)) from applying the raising operator to the level's wavefunction."""
    traj = eigenfunction(problem, level, cfg)
    raised = runge_lenz_raise(traj, problem.channel.l, level.energy)
    g = problem.bc.gamma if not problem.bc.is_dirichlet else math.inf
    return raised.robin_residual(g), float(traj.y1[-1])


def reentry_residual(problem: CavityProblem, level: EnergyLevel,
                     cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """Scale-normalized wall residual of the doubly raised eigenstate.

    Dirichlet: |chi(R)| / max|chi| on [R/2, R].  Robin: |gamma chi(R) + chi'(R)|
    over the larger of max|gamma chi| and max|chi'| on the same interval.
    """
    if problem.model is not Model.SCHRODINGER:
        raise ValueError("re-entry is checked on Schrodinger channels")
    traj = eigenfunction(problem, level, cfg)
    raised = runge_lenz_raise2(traj, problem.channel.l, level.energy)
    g = math.inf if problem.bc.is_dirichlet else problem.bc.gamma
    scale = raised.outer_scale(g)
    if scale == 0.0:
        raise ArithmeticError("raised state vanishes on the outer half of the cavity")
    return abs(raised.robin_residual(g)) / scale


# ------------------------------------------------------------ predictions

@dataclass(frozen=True)
class DegeneracyPrediction:
    model: Model
    l: int
    j_in: Optional[Fraction]
    j_out: Optional[Fraction]
    radius: Fraction
    gamma_options: tuple  # Fractions, or math.inf for Dirichlet

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("predicted radius must be positive")
        if not self.gamma_options:
            raise ValueError("a possible case needs at least one gamma")

    @property
    def l_out(self) -> int:
        return self.l + 2

    def channels(self) -> Tuple[Channel, Channel]:
        if self.model is Model.SCHRODINGER:
            return Channel.schrodinger(self.l), Channel.schrodinger(self.l + 2)
        return (Channel.pauli_from_j(self.l, float(self.j_in)),
                Channel.pauli_from_j(self.l + 2, float(self.j_out)))


@dataclass(frozen=True)
class ImpossibleDegeneracy:
    l: int
    j_in: Fraction
    j_out: Fraction
    reason: str


def predict_degeneracy_schrodinger(l: int) -> DegeneracyPrediction:
    if l < 0:
        raise ValueError("l must be >= 0")
    R = Fraction((l + 1) * (l + 2))
    return DegeneracyPrediction(Model.SCHRODINGER, l, None, None, R, (math.inf, 2 / R))


def predict_degeneracy_pauli(l: int, j_in_sign: int,
                             j_out_sign: int) -> Union[DegeneracyPrediction, ImpossibleDegeneracy]:
    """Remnant l -> l+2 degeneracy in the Pauli model.

    ``j_in_sign`` picks j = l +- 1/2, ``j_out_sign`` picks j' = (l+2) +- 1/2.
    """
    if j_in_sign not in (1, -1) or j_out_sign not in (1, -1):
        raise ValueError("signs must be +1 or -1")
    if l < 0 or (l == 0 and j_in_sign == -1):
        raise DomainError(f"no j = l - 1/2 state for l = {l}")
    half = Fraction(1, 2)
    j_in = l + j_in_sign * half
    j_out = l + 2 + j_out_sign * half
    p = (l + 1) * (l + 2)
    if j_in_sign == 1 and j_out_sign == 1:
        R = Fraction(p * (2 * l + 5), 2 * l + 3)
        gammas = (Fraction(-1, 2 * p), Fraction(1, l + 1))
    elif j_in_sign == 1:
        return ImpossibleDegeneracy(l, j_in, j_out,
                                    "the boundary conditions agree only for vanishing charge and gamma = 0")
    elif j_out_sign == 1:
        R = Fraction(2 * p)
        gammas = (-1 / R, 3 / R)
    else:
        R = Fraction(p * (2 * l + 1), 2 * l + 3)
        gammas = (Fraction(-1, 2 * p), Fraction(-1, l + 2))
    return DegeneracyPrediction(Model.PAULI, l, j_in, j_out, R, gammas)


# ------------------------------------------------------------------ Dirac

def dirac_nu_condition(k: int, alpha: float) -> Tuple[float, float]:
    """Both roots of alpha (nu^2 + 1) / (2 nu) = k: nu = (k +- sqrt(k^2 - alpha^2)) / alpha."""
    if k == 0 or int(k) != k:
        raise ValueError("k must be a nonzero integer")
    if not 0.0 < alpha < abs(k):
        raise DomainError(f"need 0 < alpha < |k|, got alpha={alpha}, k={k}")
    root = math.sqrt(k * k - alpha * alpha)
    big = (k + math.copysign(root, k)) / alpha
    # Vieta: the product of the roots is 1, which avoids cancellation in the small one
    return big, 1.0 / big


@dataclass(frozen=True)
class DiracLifting:
    splitting: float
    level_minus: EnergyLevel  # channel -|k|, one node
    level_plus: EnergyLevel   # channel +|k|, nodeless


def verify_dirac_lifting(alpha: float, k: int, R: float, nu: float,
                         cfg: IntegratorConfig = DEFAULT_CONFIG,
                         window: Optional[Tuple[float, float]] = None) -> DiracLifting:
    """|E(-|k|, n = |k|+1) - E(+|k|, n = |k|+1)| in a cavity with bag parameter ``nu``.

    These two levels coincide in infinite volume (2S1/2 and 2P1/2 for |k| = 1).
    """
    units = UnitSystem(Model.DIRAC, alpha)
    bc = BoundaryCondition.from_nu(nu)
    levels = []
    for kk, node in ((-abs(k), 1), (abs(k), 0)):
        prob = CavityProblem(units, Channel.dirac(kk), bc, R)
        spec = scan_levels(prob, window, max_levels=node + 1, cfg=cfg, grid_points=80,
                           auto_extend=True, cross_check=False)
        levels.append(spec.by_node(node))
    minus, plus = levels
    return DiracLifting(abs(minus.energy - plus.energy), minus, plus)
