"""Root bracketing, refinement and labelling of cavity spectra; sweeps; degeneracy location."""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.integrate import simpson

from . import oracle
from .oracle import DEFAULT_CONFIG, IntegratorConfig
from .radial import (
    DEFAULT_WINDOWS,
    BoundaryCondition,
    CavityProblem,
    Channel,
    Model,
    boundary_fn,
    wall_condition,
    wall_phase,
)

__all__ = [
    "Engine",
    "EnergyLevel",
    "Spectrum",
    "SweepPoint",
    "Degeneracy",
    "SolverError",
    "WindowTooSmallError",
    "RefinementExhaustedError",
    "NoSignChangeError",
    "probe",
    "scan_levels",
    "find_level",
    "sweep",
    "locate_degeneracy",
    "orthogonality_check",
    "eigenfunction",
]

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-9
ENERGY_XTOL = 1e-15
MAX_REFINE_DEPTH = 10


class SolverError(RuntimeError):
    pass


class WindowTooSmallError(SolverError):
    def __init__(self, message, spectrum=None):
        super().__init__(message)
        self.spectrum = spectrum


class RefinementExhaustedError(SolverError):
    pass


class NoSignChangeError(SolverError):
    pass


class Engine(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    SHOOTING = "shooting"
    BOTH = "both"


@dataclass(frozen=True)
class EnergyLevel:
    channel: Channel
    node_count: int
    principal_label: int
    energy: float
    residual: float
    engine: Engine

    @property
    def label(self) -> str:
        return self.channel.spectroscopic(self.principal_label)


@dataclass
class Spectrum:
    problem: CavityProblem
    levels: list = field(default_factory=list)

    @property
    def energies(self) -> list:
        return [lv.energy for lv in self.levels]

    def by_node(self, node_count: int) -> EnergyLevel:
        for lv in self.levels:
            if lv.node_count == node_count:
                return lv
        raise KeyError(f"no level with node_count={node_count} in this spectrum")


@dataclass(frozen=True)
class _Probe:
    eps: float
    f: float
    count: int
    match: oracle.MatchResult


def _match(problem: CavityProblem, eps: float, cfg: IntegratorConfig, r_match=None) -> oracle.MatchResult:
    ch = problem.channel
    theta = wall_phase(problem)
    if problem.model is Model.DIRAC:
        return oracle.match_dirac(eps, ch.k, problem.units.alpha, problem.radius, theta, cfg, r_match)
    return oracle.match_schrodinger(eps, ch.l, problem.radius, theta, cfg, r_match)


def probe(problem: CavityProblem, eps: float, cfg: IntegratorConfig = DEFAULT_CONFIG,
          r_match: Optional[float] = None) -> _Probe:
    """One matched shot at ``eps``: phase mismatch ``f`` and oscillation count.

    ``count`` is the number of wall-condition angles the outward Pruefer phase
    has passed by the wall.  It is non-decreasing in ``eps`` and steps by one
    across each eigenvalue; for Schrodinger/Pauli it equals the number of
    levels below eps.  ``f`` vanishes exactly at the levels and changes sign
    there.
    """
    m = _match(problem, eps, cfg, r_match)
    return _Probe(eps, m.mismatch, m.count, m)


def _brent(fn, a, b):
    return brentq(fn, a, b, xtol=ENERGY_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200)


def _refine(problem: CavityProblem, a: _Probe, b: _Probe, cfg: IntegratorConfig,
            cross_check: bool, closed_form: bool = True) -> EnergyLevel:
    """Brent refinement of one bracketed root, with engine bookkeeping.

    The residual reported is the matched phase mismatch at the final energy;
    the closed form, when it applies, supplies the energy itself.
    """
    _, rho, _, _ = oracle.radial_grid(problem.radius, cfg.step_count, cfg.start_fraction)
    r_m = rho[2 * a.match.match_index]
    for _ in range(3):
        # hold the match point fixed inside the bracket so the function is smooth
        shoot_f = lambda e: probe(problem, e, cfg, r_m).f  # noqa: E731
        fa, fb = shoot_f(a.eps), shoot_f(b.eps)
        if fa * fb > 0:
            raise NoSignChangeError(f"no sign change of the mismatch in [{a.eps!r}, {b.eps!r}]")
        root_s = a.eps if fa == 0 else b.eps if fb == 0 else _brent(shoot_f, a.eps, b.eps)
        # the best match point depends on the energy; redo once it is known
        r_best = rho[2 * probe(problem, root_s, cfg).match.match_index]
        if r_best == r_m:
            break
        r_m = r_best
    engine = Engine.SHOOTING
    root = root_s
    if closed_form and problem.model is not Model.DIRAC and b.eps < 0:
        closed = lambda e: boundary_fn(problem, e, cfg)  # noqa: E731
        ca, cb = closed(a.eps), closed(b.eps)
        if ca * cb < 0:
            root_c = _brent(closed, a.eps, b.eps)
            if not cross_check or abs(root_c - root_s) <= RESIDUAL_TOL:
                root = root_c
                engine = Engine.BOTH if cross_check else Engine.CLOSED_FORM
            else:
                log.warning("engines disagree for %s: closed form %.15g vs shooting %.15g",
                            problem.channel.key, root_c, root_s)
    at_root = probe(problem, root, cfg, r_m)
    resid = at_root.f
    if abs(resid) > RESIDUAL_TOL:
        raise SolverError(f"refined root {root!r} has residual {resid:.3e}")
    nodes = at_root.match.nodes_at_root()
    return EnergyLevel(problem.channel, nodes, problem.channel.principal_label(nodes), root, resid, engine)


def _brackets(problem, lo: _Probe, hi: _Probe, cfg, depth=0):
    """Yield (a, b) probe pairs each holding exactly one sign change of the determinant."""
    dn = hi.count - lo.count
    if dn <= 0:
        return
    if dn == 1 and lo.f * hi.f <= 0:
        yield lo, hi
        return
    if depth >= MAX_REFINE_DEPTH:
        raise RefinementExhaustedError(
            f"could not isolate roots in [{lo.eps!r}, {hi.eps!r}] (count jump {dn})")
    pts = [lo] + [probe(problem, e, cfg) for e in np.linspace(lo.eps, hi.eps, 5)[1:-1]] + [hi]
    for a, b in zip(pts[:-1], pts[1:]):
        yield from _brackets(problem, a, b, cfg, depth + 1)


def _clip_to_levels(problem, lo: _Probe, hi: _Probe, wanted: int, cfg) -> _Probe:
    """Shrink the upper end so that at most ``wanted`` (plus slack) levels remain."""
    target = lo.count + wanted
    if hi.count <= target:
        return hi
    a, b = lo, hi
    # bisect on the count until the upper end holds exactly target levels
    for _ in range(80):
        mid = probe(problem, 0.5 * (a.eps + b.eps), cfg)
        if mid.count > target:
            b = mid
        else:
            a = mid
        if a.count == target and b.count > target and b.eps - a.eps < 1e-3 * (hi.eps - lo.eps):
            break
    return b


def scan_levels(problem: CavityProblem, window: Optional[tuple] = None, max_levels: Optional[int] = None,
                *, cfg: IntegratorConfig = DEFAULT_CONFIG, grid_points: int = 400,
                auto_extend: bool = False, cross_check: bool = True,
                closed_form: bool = True) -> Spectrum:
    """Find the cavity levels of ``problem`` inside ``window`` (lowest ``max_levels`` if given).

    The window is sampled on ``grid_points`` energies; sub-intervals whose
    oscillation count jumps by more than one, or whose determinant does not
    change sign, are split four-fold until every bracket holds a single root.
    Roots are refined by Brent's method to ~1e-13 in energy.  Below zero
    energy (Schrodinger/Pauli) the closed-form determinant supplies the final
    value unless ``closed_form`` is off; ``cross_check`` then also demands
    that the shooting root agrees to 1e-9.

    Raises
    ------
    WindowTooSmallError
        when fewer than ``max_levels`` levels lie in the window (the partial
        spectrum is attached).  With ``auto_extend`` the upper end is doubled
        (in distance from the lower end) until enough levels fit, and for
        Schrodinger/Pauli the lower end is lowered until no level lies below.
    """
    lo_e, hi_e = window if window is not None else DEFAULT_WINDOWS[problem.model]
    if not lo_e < hi_e:
        raise ValueError(f"empty window ({lo_e}, {hi_e})")
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    lo = probe(problem, lo_e, cfg)
    hi = probe(problem, hi_e, cfg)
    if auto_extend and problem.model is not Model.DIRAC:
        # the count is absolute here: push the lower end under the ground state
        span = hi_e - lo_e
        for _ in range(30):
            if lo.count == 0:
                break
            span *= 2.0
            lo = probe(problem, hi_e - span, cfg)
    if max_levels is not None and auto_extend:
        span = hi_e - lo_e
        for _ in range(30):
            if hi.count - lo.count >= max_levels:
                break
            span *= 2.0
            hi = probe(problem, lo.eps + span, cfg)
    if max_levels is not None:
        hi_clip = _clip_to_levels(problem, lo, hi, max_levels, cfg)
    else:
        hi_clip = hi

    energies = np.linspace(lo.eps, hi_clip.eps, grid_points)
    grid = [lo] + [probe(problem, e, cfg) for e in energies[1:-1]] + [hi_clip]
    levels = []
    for a, b in zip(grid[:-1], grid[1:]):
        for x, y in _brackets(problem, a, b, cfg):
            levels.append(_refine(problem, x, y, cfg, cross_check, closed_form))
    levels.sort(key=lambda lv: lv.energy)
    if max_levels is not None:
        levels = levels[:max_levels]
    spectrum = Spectrum(problem, levels)
    _check_spectrum(spectrum)
    if max_levels is not None and len(levels) < max_levels:
        raise WindowTooSmallError(
            f"only {len(levels)} of {max_levels} levels in window ({lo.eps}, {hi.eps}) "
            f"for {problem.channel.key}", spectrum)
    return spectrum


def _check_spectrum(spectrum: Spectrum):
    levels = spectrum.levels
    for a, b in zip(levels[:-1], levels[1:]):
        if not b.energy > a.energy:
            raise SolverError("energies are not strictly increasing")
        if b.node_count != a.node_count + 1:
            raise SolverError(f"node counts not consecutive: {a.node_count} -> {b.node_count}")


def find_level(problem: CavityProblem, node_count: int, *, cfg: IntegratorConfig = DEFAULT_CONFIG,
               window: Optional[tuple] = None, cross_check: bool = False) -> EnergyLevel:
    """The single level of ``problem`` with the given node count.

    Uses bisection on the oscillation count to isolate the level, so no
    grid scan is needed.  Schrodinger/Pauli only (their count is absolute).
    """
    if problem.model is Model.DIRAC:
        spec = scan_levels(problem, window, max_levels=node_count + 1, cfg=cfg, grid_points=60,
                           auto_extend=True, cross_check=cross_check)
        return spec.by_node(node_count)
    lo_e, hi_e = window if window is not None else DEFAULT_WINDOWS[problem.model]
    lo, hi = probe(problem, lo_e, cfg), probe(problem, hi_e, cfg)
    for _ in range(60):
        if lo.count <= node_count:
            break
        lo_e -= 2.0 * (hi_e - lo_e)
        lo = probe(problem, lo_e, cfg)
    for _ in range(60):
        if hi.count >= node_count + 1:
            break
        hi_e += 2.0 * (hi_e - lo_e)
        hi = probe(problem, hi_e, cfg)
    if lo.count > node_count or hi.count < node_count + 1:
        raise WindowTooSmallError(f"could not bracket node_count={node_count}")
    a, b = lo, hi
    for _ in range(200):
        if a.count == node_count and b.count == node_count + 1 and a.f * b.f < 0:
            break
        mid = probe(problem, 0.5 * (a.eps + b.eps), cfg)
        if mid.count <= node_count:
            a = mid
        else:
            b = mid
    else:
        raise RefinementExhaustedError(f"could not isolate node_count={node_count}")
    return _refine(problem, a, b, cfg, cross_check)


# ------------------------------------------------------------------- sweeps

@dataclass
class SweepPoint:
    index: int
    value: float
    spectrum: Optional[Spectrum]
    error: Optional[str] = None


def problem_at(template: CavityProblem, parameter: str, value: float) -> CavityProblem:
    if parameter == "radius":
        return template.with_radius(value)
    if parameter == "inverse_radius":
        return template.with_radius(1.0 / value)
    if parameter == "gamma_angle":
        scale = 1.0 if template.model is Model.DIRAC else template.radius
        return template.with_bc(BoundaryCondition.from_angle(value, scale))
    raise ValueError(f"unknown sweep parameter {parameter!r}")


def sweep(template: CavityProblem, parameter: str, grid: Sequence[float], *,
          window: Optional[tuple] = None, max_levels: Optional[int] = None,
          cfg: IntegratorConfig = DEFAULT_CONFIG, grid_points: int = 400,
          auto_extend: bool = False, threads: int = 1) -> list:
    """Spectra along a parameter grid.

    ``parameter`` is ``'radius'``, ``'inverse_radius'`` (a/R) or
    ``'gamma_angle'`` (theta = arctan(gamma R), or arctan(nu) for Dirac).  Failures are recorded per point and do not stop
    the sweep.  Output order follows the grid regardless of ``threads``.
    """
    grid = [float(g) for g in grid]
    if any(b < a for a, b in zip(grid[:-1], grid[1:])):
        raise ValueError("sweep grid must be sorted")

    def run(item):
        i, value = item
        try:
            prob = problem_at(template, parameter, value)
            spec = scan_levels(prob, window, max_levels, cfg=cfg, grid_points=grid_points,
                               auto_extend=auto_extend, cross_check=False)
            return SweepPoint(i, value, spec)
        except (SolverError, ValueError, ArithmeticError) as exc:
            partial = getattr(exc, "spectrum", None)
            return SweepPoint(i, value, partial, f"{type(exc).__name__}: {exc}")

    items = list(enumerate(grid))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(run, items))
    else:
        points = [run(it) for it in items]
    points.sort(key=lambda p: p.index)
    return points


# -------------------------------------------------------------- degeneracy

@dataclass(frozen=True)
class Degeneracy:
    parameter: str
    value: float
    energy: float
    splitting: float
    level_a: EnergyLevel
    level_b: EnergyLevel


def locate_degeneracy(template: CavityProblem, channel_a: Channel, node_a: int,
                      channel_b: Channel, node_b: int, vary: str, bracket: tuple, *,
                      cfg: IntegratorConfig = DEFAULT_CONFIG, xtol: float = 1e-10) -> Degeneracy:
    """Parameter value where E_a - E_b changes sign inside ``bracket``.

    ``template`` supplies units, boundary condition and radius; ``vary`` is
    ``'radius'``, ``'gamma'`` (Robin parameter) or ``'gamma_angle'``.
    """
    def problems(p):
        if vary == "radius":
            base = template.with_radius(p)
        elif vary == "gamma":
            base = template.with_bc(BoundaryCondition.robin(p))
        elif vary == "gamma_angle":
            base = problem_at(template, "gamma_angle", p)
        else:
            raise ValueError(f"unknown parameter {vary!r}")
        return base.with_channel(channel_a), base.with_channel(channel_b)

    def levels(p):
        pa, pb = problems(p)
        return find_level(pa, node_a, cfg=cfg), find_level(pb, node_b, cfg=cfg)

    def delta(p):
        la, lb = levels(p)
        return la.energy - lb.energy

    lo, hi = bracket
    d_lo, d_hi = delta(lo), delta(hi)
    if d_lo == 0.0:
        root = lo
    elif d_hi == 0.0:
        root = hi
    elif d_lo * d_hi > 0:
        raise NoSignChangeError(f"E_a - E_b does not change sign on [{lo}, {hi}] "
                                f"({d_lo:.3e}, {d_hi:.3e})")
    else:
        root = brentq(delta, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    la, lb = levels(root)
    return Degeneracy(vary, root, 0.5 * (la.energy + lb.energy), la.energy - lb.energy, la, lb)


# ----------------------------------------------------------- eigenfunctions

def eigenfunction(problem: CavityProblem, level: EnergyLevel, cfg: IntegratorConfig = DEFAULT_CONFIG):
    """Level wavefunction on the integrator nodes (outward and inward pieces glued)."""
    ch = problem.channel
    theta = wall_phase(problem)
    if problem.model is Model.DIRAC:
        return oracle.trajectory_dirac(level.energy, ch.k, problem.units.alpha, problem.radius, cfg, theta)
    return oracle.trajectory_schrodinger(level.energy, ch.l, problem.radius, cfg, theta)


def _overlap(problem, ti, tj) -> float:
    weight = ti.rho ** 2 * ti.drho_dt
    if problem.model is Model.DIRAC:
        density = ti.y1 * tj.y1 + ti.y2 * tj.y2
        power = 2.0 * oracle.dirac_exponent(problem.channel.k, problem.units.alpha)
    else:
        density = ti.y1 * tj.y1
        power = 2.0 * problem.channel.l + 2.0
    # [0, r0] is outside the grid; there the integrand is ~ rho^power
    head = density[0] * ti.rho[0] ** 3 / (power + 1.0)
    return float(simpson(density * weight, x=ti.t)) + head


def orthogonality_check(problem: CavityProblem, level_i: EnergyLevel, level_j: EnergyLevel,
                        cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """|<psi_i|psi_j>| / (|psi_i| |psi_j|) with r^2 dr weight, Simpson on the integrator grid."""
    if level_i.channel != problem.channel or level_j.channel != problem.channel:
        raise ValueError("levels must belong to the problem's channel")
    ti = eigenfunction(problem, level_i, cfg)
    tj = ti if level_j == level_i else eigenfunction(problem, level_j, cfg)
    nij = _overlap(problem, ti, tj)
    nii = _overlap(problem, ti, ti)
    njj = nii if tj is ti else _overlap(problem, tj, tj)
    if not (nii > 0 and njj > 0 and math.isfinite(nij)):
        raise SolverError("quadrature failed (non-positive or non-finite norm)")
    return abs(nij) / math.sqrt(nii * njj)
