"""Figure-dataset presets: which channels, boundary condition and axis each panel sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .radial import BoundaryCondition, CavityProblem, Channel, Model, UnitSystem

__all__ = ["ChannelSpec", "Panel", "PRESETS", "preset_panels", "DEFAULT_DIRAC_ALPHA"]

DEFAULT_DIRAC_ALPHA = math.sqrt(15.0 / 16.0)
PRESET_GRID_POINTS = 24     # energy grid per scan; the count bisection does the isolating
RADIUS_AXIS = tuple(np.linspace(0.02, 1.2, 60))
ANGLE_AXIS = tuple(np.linspace(-math.pi / 2, math.pi / 2, 41)[1:])


@dataclass(frozen=True)
class ChannelSpec:
    channel: Channel
    levels: int


@dataclass(frozen=True)
class Panel:
    name: str
    model: Model
    bc: BoundaryCondition
    parameter: str                 # 'inverse_radius' (a/R) or 'gamma_angle'
    grid: Tuple[float, ...]
    channels: Tuple[ChannelSpec, ...]
    radius: float = 1.0            # fixed radius for angle sweeps
    alpha: Optional[float] = None
    window: Optional[Tuple[float, float]] = None

    def template(self, channel: Channel) -> CavityProblem:
        return CavityProblem(UnitSystem(self.model, self.alpha), channel, self.bc, self.radius)


def _s(l, levels):
    return ChannelSpec(Channel.schrodinger(l), levels)


def _p(l, j2, levels):
    return ChannelSpec(Channel.pauli_from_j(l, j2 / 2), levels)


def _d(k, levels):
    return ChannelSpec(Channel.dirac(k), levels)


# n = 1..3 shells
_SCHR_SHELLS = (_s(0, 3), _s(1, 2), _s(2, 1))
_PAULI_SHELLS = (_p(0, 1, 3), _p(1, 1, 2), _p(1, 3, 2), _p(2, 3, 1), _p(2, 5, 1))
# n = 1, 2: 1S1/2, 2S1/2, 2P1/2, 2P3/2
_DIRAC_SHELLS = (_d(-1, 2), _d(1, 1), _d(-2, 1))
# P and F states up to the fifth shell
_PF = (_p(1, 1, 4), _p(1, 3, 4), _p(3, 5, 2), _p(3, 7, 2))


def _dirac(name, bc, alpha):
    return Panel(name, Model.DIRAC, bc, "inverse_radius", RADIUS_AXIS, _DIRAC_SHELLS, alpha=alpha)


def _build(alpha: float) -> dict:
    dirichlet, neumann = BoundaryCondition.dirichlet(), BoundaryCondition.neumann()
    sd = (_s(0, 4), _s(2, 2))
    fig7_gamma = BoundaryCondition.robin(-1.0 / 12.0)
    return {
        "fig1": (Panel("fig1", Model.SCHRODINGER, dirichlet, "inverse_radius", RADIUS_AXIS, _SCHR_SHELLS),),
        "fig2": (Panel("fig2", Model.SCHRODINGER, neumann, "inverse_radius", RADIUS_AXIS, _SCHR_SHELLS),),
        "fig3-top": (Panel("fig3-top", Model.SCHRODINGER, BoundaryCondition.robin(1.0), "inverse_radius",
                           RADIUS_AXIS, sd),),
        "fig3-bottom": (Panel("fig3-bottom", Model.SCHRODINGER, dirichlet, "gamma_angle", ANGLE_AXIS, sd,
                              radius=2.0),),
        "fig4": (_dirac("fig4", dirichlet, alpha),),
        "fig5": (_dirac("fig5", BoundaryCondition.from_nu(0.0), alpha),),
        "fig6": (Panel("fig6", Model.PAULI, neumann, "inverse_radius", RADIUS_AXIS, _PAULI_SHELLS),),
        "fig7-top-left": (Panel("fig7-top-left", Model.PAULI, fig7_gamma, "inverse_radius",
                                tuple(np.linspace(0.05, 0.3, 51)), _PF),),
        "fig7-top-right": (Panel("fig7-top-right", Model.PAULI, dirichlet, "gamma_angle", ANGLE_AXIS, _PF,
                                 radius=42.0 / 5.0),),
        "fig7-bottom-left": (Panel("fig7-bottom-left", Model.PAULI, dirichlet, "gamma_angle", ANGLE_AXIS, _PF,
                                   radius=12.0),),
        "fig7-bottom-right": (Panel("fig7-bottom-right", Model.PAULI, dirichlet, "gamma_angle", ANGLE_AXIS,
                                    _PF, radius=18.0 / 5.0),),
    }


def preset_panels(name: str, alpha: Optional[float] = None) -> Tuple[Panel, ...]:
    """Panels of a preset.  ``fig3`` and ``fig7`` expand to all of their panels."""
    table = _build(DEFAULT_DIRAC_ALPHA if alpha is None else alpha)
    if name in table:
        return table[name]
    group = tuple(p for key, panels in table.items() if key.startswith(name + "-") for p in panels)
    if not group:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return group


PRESETS = ("fig1", "fig2", "fig3", "fig3-top", "fig3-bottom", "fig4", "fig5", "fig6", "fig7",
           "fig7-top-left", "fig7-top-right", "fig7-bottom-left", "fig7-bottom-right")
