"""Spectral solver for a hydrogen atom confined to a spherical cavity.

Schrodinger, Pauli and Dirac radial problems with Robin/bag wall conditions,
plus accidental-degeneracy diagnostics and figure datasets.
"""

from .radial import BoundaryCondition, CavityProblem, Channel, DomainError, Model, UnitSystem
from .oracle import IntegratorConfig
from .eigensolve import EnergyLevel, Spectrum, find_level, locate_degeneracy, scan_levels, sweep

__version__ = "0.1.0"

__all__ = ["BoundaryCondition", "CavityProblem", "Channel", "DomainError", "Model", "UnitSystem",
           "IntegratorConfig", "EnergyLevel", "Spectrum", "find_level", "locate_degeneracy",
           "scan_levels", "sweep"]
