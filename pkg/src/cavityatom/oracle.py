"""Fixed-step shooting integrator for the radial Schrodinger and Dirac equations.

The radial coordinate is mapped to a uniform variable ``t`` with

    t = ln(rho) + rho / c,      d rho / d t = rho * c / (rho + c),

so steps are geometric near the origin and uniform (``~ c * dt``) far out.
Classical RK4 runs on the uniform ``t`` grid from ``r0 = start_fraction * R``
to ``R``; every call with the same configuration visits the same points,
which keeps sweeps bit-reproducible.

State variables are chosen so that both components scale alike at the origin:

* Schrodinger: ``y1 = psi``, ``y2 = rho * psi'``
* Dirac: ``y1 = psi_A``, ``y2 = psi_B``

For level finding the outward solution is also matched against an inward
solution that starts from the wall condition; the two meet near the classical
turning point, so neither direction has to carry an exponentially
subdominant component (see :class:`MatchResult`).

Alongside the solution the kernels track a continuous Pruefer angle
(of ``(rho psi, psi + rho psi')`` for Schrodinger, of ``(psi_A, psi_B)`` for
Dirac).  It increases monotonically with energy, its multiples of pi mark the
nodes, and it drives the level counting in :mod:`cavityatom.eigensolve`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

__all__ = [
    "IntegratorConfig",
    "ShootResult",
    "Trajectory",
    "radial_grid",
    "shoot_schrodinger",
    "shoot_dirac",
    "trajectory_schrodinger",
    "trajectory_dirac",
    "MatchResult",
    "match_schrodinger",
    "match_dirac",
    "turning_radius",
    "count_nodes",
]

GRID_SCALE = 1.0
RESCALE_AT = 1e100
# a zero this close (in Pruefer angle) to the wall belongs to the boundary, not the interior
NODE_PHASE_TOL = 1e-7


@dataclass(frozen=True)
class IntegratorConfig:
    step_count: int = 20000
    start_fraction: float = 1e-6
    method_order: int = 4

    def __post_init__(self):
        if self.step_count < 1000:
            raise ValueError(f"step_count must be >= 1000, got {self.step_count}")
        if self.step_count % 2:
            raise ValueError("step_count must be even (Simpson quadrature on the grid)")
        if not 0.0 < self.start_fraction <= 1e-3:
            raise ValueError(f"start_fraction must lie in (0, 1e-3], got {self.start_fraction}")
        if self.method_order != 4:
            raise ValueError("only the classical 4th-order Runge-Kutta scheme is implemented")


DEFAULT_CONFIG = IntegratorConfig()


@dataclass(frozen=True)
class ShootResult:
    """End-point data of one outward integration.

    ``y1``/``y2`` are the raw state components at R, carrying an overall scale
    ``exp(-log_scale)`` relative to the unrescaled solution.
    """

    r: float
    y1: float
    y2: float
    phase: float
    phase0: float
    node_count: int
    log_scale: float


@dataclass
class Trajectory:
    """Sampled solution on the integrator grid, rescaled to a common scale."""

    t: np.ndarray
    rho: np.ndarray
    drho_dt: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    phase: np.ndarray


def _t_of_rho(rho, c):
    return np.log(rho) + rho / c


def _rho_of_t(t: np.ndarray, c: float) -> np.ndarray:
    # Newton on y = ln(rho):  y + exp(y)/c = t
    y = np.minimum(t, np.log(c * np.maximum(t, 1.0)))
    for _ in range(100):
        ey = np.exp(y)
        g = y + ey / c - t
        y_new = y - g / (1.0 + ey / c)
        if np.all(np.abs(y_new - y) <= 1e-15 * np.maximum(1.0, np.abs(y_new))):
            y = y_new
            break
        y = y_new
    return np.exp(y)


@lru_cache(maxsize=64)
def radial_grid(R: float, step_count: int, start_fraction: float):
    """Half-step grid for RK4: arrays ``rho`` and ``w = c / (rho + c)`` of length 2N+1.

    Even indices are the integration nodes, odd indices the RK4 midpoints.
    The end points are pinned exactly to ``r0`` and ``R``.
    """
    c = GRID_SCALE
    r0 = start_fraction * R
    t0, t1 = _t_of_rho(r0, c), _t_of_rho(R, c)
    t = np.linspace(t0, t1, 2 * step_count + 1)
    rho = _rho_of_t(t, c)
    rho[0], rho[-1] = r0, R
    w = c / (rho + c)
    dt = (t1 - t0) / step_count
    for arr in (t, rho, w):
        arr.setflags(write=False)
    return t, rho, w, dt


@njit(cache=True, inline="always")
def _schr_rhs(y1, y2, rho, w, L, eps):
    return w * y2, w * (-y2 + (L - 2.0 * rho - 2.0 * eps * rho * rho) * y1)


@njit(cache=True, inline="always")
def _dirac_rhs(y1, y2, rho, w, k, alpha, eps):
    a2 = alpha * alpha
    d1 = w * ((rho * (eps + 1.0) + a2) * y2 / alpha - (1.0 + k) * y1)
    d2 = w * ((rho * (1.0 - eps) - a2) * y1 / alpha - (1.0 - k) * y2)
    return d1, d2


@njit(cache=True, inline="always")
def _schr_angle(y1, y2, rho):
    return math.atan2(rho * y1, y1 + y2)


@njit(cache=True, inline="always")
def _unwrap(prev, raw):
    d = raw - (prev % (2.0 * math.pi))
    if d > math.pi:
        d -= 2.0 * math.pi
    elif d < -math.pi:
        d += 2.0 * math.pi
    return prev + d


@njit(cache=True, nogil=True)
def _integrate(model, rho, w, dt, y1, y2, L, k, alpha, eps, i_start, i_end, phase, store):
    """RK4 between grid nodes ``i_start`` and ``i_end`` (either direction).

    model 0 = Schrodinger, 1 = Dirac.  ``phase`` is the continuous Pruefer
    angle at the start node; it is unwrapped along the way.  Returns
    (y1, y2, phase, log_scale, traj) where traj is a (4, nodes) array
    [y1, y2, phase, log_scale] when ``store`` is set.
    """
    step = 1 if i_end >= i_start else -1
    count = abs(i_end - i_start)
    if store:
        traj = np.empty((4, count + 1))
        traj[0, 0] = y1
        traj[1, 0] = y2
        traj[2, 0] = phase
        traj[3, 0] = 0.0
    else:
        traj = np.empty((4, 1))
    log_scale = 0.0
    h = dt * step
    i = i_start
    for s in range(count):
        j = 2 * i
        r_a, r_m, r_b = rho[j], rho[j + step], rho[j + 2 * step]
        w_a, w_m, w_b = w[j], w[j + step], w[j + 2 * step]
        if model == 0:
            k1a, k1b = _schr_rhs(y1, y2, r_a, w_a, L, eps)
            k2a, k2b = _schr_rhs(y1 + 0.5 * h * k1a, y2 + 0.5 * h * k1b, r_m, w_m, L, eps)
            k3a, k3b = _schr_rhs(y1 + 0.5 * h * k2a, y2 + 0.5 * h * k2b, r_m, w_m, L, eps)
            k4a, k4b = _schr_rhs(y1 + h * k3a, y2 + h * k3b, r_b, w_b, L, eps)
        else:
            k1a, k1b = _dirac_rhs(y1, y2, r_a, w_a, k, alpha, eps)
            k2a, k2b = _dirac_rhs(y1 + 0.5 * h * k1a, y2 + 0.5 * h * k1b, r_m, w_m, k, alpha, eps)
            k3a, k3b = _dirac_rhs(y1 + 0.5 * h * k2a, y2 + 0.5 * h * k2b, r_m, w_m, k, alpha, eps)
            k4a, k4b = _dirac_rhs(y1 + h * k3a, y2 + h * k3b, r_b, w_b, k, alpha, eps)
        y1 = y1 + h * (k1a + 2.0 * k2a + 2.0 * k3a + k4a) / 6.0
        y2 = y2 + h * (k1b + 2.0 * k2b + 2.0 * k3b + k4b) / 6.0
        big = abs(y1) + abs(y2)
        if big > RESCALE_AT:
            y1 /= big
            y2 /= big
            log_scale += math.log(big)
        if model == 0:
            raw = _schr_angle(y1, y2, r_b)
        else:
            raw = math.atan2(y1, y2)
        phase = _unwrap(phase, raw)
        i += step
        if store:
            traj[0, s + 1] = y1
            traj[1, s + 1] = y2
            traj[2, s + 1] = phase
            traj[3, s + 1] = log_scale
    return y1, y2, phase, log_scale, traj


def _initial_phase(model, y1, y2, r):
    if model == 0:
        return math.atan2(r * y1, y1 + y2)
    return math.atan2(y1, y2)


def count_nodes(phase0: float, phase: float, tol: float = NODE_PHASE_TOL) -> int:
    """Number of multiples of pi strictly inside (phase0, phase - tol)."""
    hi = math.floor((phase - tol) / math.pi)
    lo = math.floor(phase0 / math.pi)
    return max(0, int(hi - lo))


def _schr_start(eps: float, l: int, r0: float):
    # psi = rho^l (c0 + c1 rho + c2 rho^2),  c_m = -(2 c_{m-1} + 2 eps c_{m-2}) / (m (2l + m + 1))
    c1 = -1.0 / (l + 1)
    c2 = -(2.0 * c1 + 2.0 * eps) / (2.0 * (2 * l + 3))
    p = r0 ** l
    psi = p * (1.0 + c1 * r0 + c2 * r0 * r0)
    rho_dpsi = p * (l + (l + 1) * c1 * r0 + (l + 2) * c2 * r0 * r0)
    return psi, rho_dpsi


def dirac_exponent(k: int, alpha: float) -> float:
    if not 0.0 < alpha < abs(k):
        raise ValueError(f"need 0 < alpha < |k| (got alpha={alpha}, k={k})")
    return math.sqrt(k * k - alpha * alpha)


def _dirac_start(eps: float, k: int, alpha: float, r0: float, terms: int = 3):
    # psi_A = rho^(s-1) sum a_m rho^m, psi_B = rho^(s-1) sum b_m rho^m
    s = dirac_exponent(k, alpha)
    P = (1.0 + eps) / alpha
    Q = (1.0 - eps) / alpha
    a, b = 1.0, (s + k) / alpha
    psi_a, psi_b = a, b
    x = 1.0
    for m in range(1, terms):
        det = m * (2.0 * s + m)
        a, b = ((s + m - k) * P * b + alpha * Q * a) / det, ((s + m + k) * Q * a - alpha * P * b) / det
        x *= r0
        psi_a += a * x
        psi_b += b * x
    lead = r0 ** (s - 1.0)
    return lead * psi_a, lead * psi_b


def _check_R(R: float) -> float:
    R = float(R)
    if not (R > 0 and math.isfinite(R)):
        raise ValueError(f"radius must be positive and finite, got {R}")
    return R


def shoot_schrodinger(eps: float, l: int, R: float, cfg: IntegratorConfig = DEFAULT_CONFIG) -> ShootResult:
    """Integrate the regular radial Schrodinger solution at energy ``eps`` out to ``R``.

    Units: energies in Me^4, lengths in Bohr radii.  ``y1`` is psi(R),
    ``y2 / R`` is psi'(R) (same scale).
    """
    R = _check_R(R)
    if l < 0:
        raise ValueError("l must be >= 0")
    _, rho, w, dt = radial_grid(R, cfg.step_count, cfg.start_fraction)
    y1, y2 = _schr_start(eps, l, rho[0])
    ph0 = _initial_phase(0, y1, y2, rho[0])
    y1, y2, ph, ls, _ = _integrate(0, rho, w, dt, y1, y2, float(l * (l + 1)), 0.0, 1.0,
                                   float(eps), 0, cfg.step_count, ph0, False)
    return ShootResult(R, y1, y2, ph, ph0, count_nodes(ph0, ph), ls)


def shoot_dirac(eps: float, k: int, alpha: float, R: float,
                cfg: IntegratorConfig = DEFAULT_CONFIG) -> ShootResult:
    """Integrate the regular radial Dirac pair (psi_A, psi_B) out to ``R``.

    Units: energies in Mc^2, lengths in a = 1/(M c alpha).  ``k`` follows the
    convention of :class:`cavityatom.radial.Channel` (k = -1 is S_1/2).
    ``node_count`` counts zeros of psi_A.
    """
    R = _check_R(R)
    if k == 0:
        raise ValueError("k must be nonzero")
    _, rho, w, dt = radial_grid(R, cfg.step_count, cfg.start_fraction)
    y1, y2 = _dirac_start(eps, k, alpha, rho[0])
    ph0 = _initial_phase(1, y1, y2, rho[0])
    y1, y2, ph, ls, _ = _integrate(1, rho, w, dt, y1, y2, 0.0, float(k), float(alpha),
                                   float(eps), 0, cfg.step_count, ph0, False)
    return ShootResult(R, y1, y2, ph, ph0, count_nodes(ph0, ph), ls)




# ------------------------------------------------------------------ matching

@dataclass(frozen=True)
class MatchResult:
    """Outward and inward Pruefer angles compared at an interior node.

    ``phase_in`` is the angle reached by integrating the wall condition (angle
    ``wall_phase`` in (0, pi]) inward.  The angle equation is pi-periodic, so
    the outward solution passes ``wall_phase + j pi`` at R exactly when
    ``phase_out`` passes ``phase_in + j pi`` at the match point.  That makes
    ``count`` and the zeros of ``mismatch`` independent of where the two
    pieces meet, while ``mismatch`` stays O(1)-sloped even when the wall
    determinant is exponentially ill-conditioned (deep levels, large R).
    """

    phase_out: float
    phase_in: float
    phase0: float
    wall_phase: float
    match_index: int

    @property
    def delta(self) -> float:
        return self.phase_out - self.phase_in

    @property
    def mismatch(self) -> float:
        return math.sin(self.delta)

    @property
    def count(self) -> int:
        d = self.delta
        return 0 if d <= 0 else int(math.floor(d / math.pi)) + 1

    def nodes_at_root(self) -> int:
        """Interior zeros of the glued eigenfunction (valid at a root)."""
        j = round(self.delta / math.pi)
        return count_nodes(self.phase0, self.wall_phase + j * math.pi)


def turning_radius(eps_nr: float, L: float, R: float) -> float:
    """Outer classical turning point of L/(2 rho^2) - 1/rho = eps_nr, capped at R."""
    if eps_nr >= 0:
        return R
    disc = 1.0 + 2.0 * eps_nr * L
    r = (1.0 + math.sqrt(disc)) / (-2.0 * eps_nr) if disc >= 0 else L
    return min(max(r, 0.0), R)


def schrodinger_match_radius(eps: float, L: float, R: float, wall_phase: float) -> float:
    """Where outward and inward pieces should meet.

    Normally the outer turning point.  When the wall is classically forbidden
    and its log-derivative is close to the growing WKB exponent (a surface
    state), the inward piece would be the subdominant solution, so the match
    moves to the wall and the outward solution carries everything.
    """
    q = 2.0 * eps + 2.0 / R - L / (R * R)
    if q < 0.0 and 0.0 < wall_phase < math.pi:
        kappa = math.sqrt(-q)
        lam = 1.0 / math.tan(wall_phase) - 1.0 / R
        if lam > 0.0 and abs(kappa - lam) < 0.5 * kappa:
            return R
    return turning_radius(eps, L, R)


def _match_index(rho, r_match: float) -> int:
    nodes = rho[::2]
    m = int(np.searchsorted(nodes, r_match))
    return min(max(m, 1), len(nodes) - 1)


def _wall_state(model, theta, R):
    s, c = math.sin(theta), math.cos(theta)
    if model == 0:
        psi = s / R
        return psi, c - psi
    return s, c


def _run_match(model, rho, w, dt, y_out, L, k, alpha, eps, theta, m, N, store):
    ph0 = _initial_phase(model, y_out[0], y_out[1], rho[0])
    o1, o2, ph_out, ls_out, tr_out = _integrate(model, rho, w, dt, y_out[0], y_out[1], L, k, alpha,
                                                eps, 0, m, ph0, store)
    i1, i2 = _wall_state(model, theta, rho[-1])
    i1, i2, ph_in, ls_in, tr_in = _integrate(model, rho, w, dt, i1, i2, L, k, alpha,
                                             eps, N, m, theta, store)
    res = MatchResult(ph_out, ph_in, ph0, theta, m)
    return res, (o1, o2, ls_out, tr_out), (i1, i2, ls_in, tr_in)


def match_schrodinger(eps: float, l: int, R: float, wall_phase: float,
                      cfg: IntegratorConfig = DEFAULT_CONFIG, r_match: float = None) -> MatchResult:
    """Outward/inward matched shot for the Schrodinger channel ``l``.

    ``wall_phase`` is the angle of (rho psi, psi + rho psi') fixed by the wall
    condition.  ``r_match`` defaults to the turning point of ``eps``.
    """
    R = _check_R(R)
    _, rho, w, dt = radial_grid(R, cfg.step_count, cfg.start_fraction)
    L = float(l * (l + 1))
    if r_match is None:
        r_match = schrodinger_match_radius(eps, L, R, wall_phase)
    m = _match_index(rho, r_match)
    res, _, _ = _run_match(0, rho, w, dt, _schr_start(eps, l, rho[0]), L, 0.0, 1.0, float(eps),
                           float(wall_phase), m, cfg.step_count, False)
    return res


def dirac_turning_radius(eps: float, k: int, alpha: float, R: float) -> float:
    l_a = abs(k) - 1 if k < 0 else abs(k)
    return turning_radius((eps - 1.0) / (alpha * alpha), float(l_a * (l_a + 1)), R)


def match_dirac(eps: float, k: int, alpha: float, R: float, wall_phase: float,
                cfg: IntegratorConfig = DEFAULT_CONFIG, r_match: float = None) -> MatchResult:
    """Outward/inward matched shot for the Dirac channel ``k``; angle of (psi_A, psi_B)."""
    R = _check_R(R)
    _, rho, w, dt = radial_grid(R, cfg.step_count, cfg.start_fraction)
    if r_match is None:
        r_match = dirac_turning_radius(eps, k, alpha, R)
    m = _match_index(rho, r_match)
    res, _, _ = _run_match(1, rho, w, dt, _dirac_start(eps, k, alpha, rho[0]), 0.0, float(k),
                           float(alpha), float(eps), float(wall_phase), m, cfg.step_count, False)
    return res


# ---------------------------------------------------------------- trajectories

def _glue(t, rho, w, m, out, inn):
    """Join outward (nodes 0..m) and inward (nodes N..m) pieces on one scale."""
    o1, o2, ls_o, tr_o = out
    i1, i2, ls_i, tr_i = inn
    so = np.exp(tr_o[3] - ls_o)          # common scale: value at the match node
    si = np.exp(tr_i[3] - ls_i)
    y1_o, y2_o = tr_o[0] * so, tr_o[1] * so
    y1_i, y2_i = (tr_i[0] * si)[::-1], (tr_i[1] * si)[::-1]
    ph_i = tr_i[2][::-1]
    dot = o1 * i1 + o2 * i2
    nrm = i1 * i1 + i2 * i2
    c = dot / nrm if nrm > 0 else 0.0
    y1 = np.concatenate([y1_o, c * y1_i[1:]])
    y2 = np.concatenate([y2_o, c * y2_i[1:]])
    # continue the outward phase across the joint
    shift = tr_o[2][-1] - ph_i[0]
    shift = math.pi * round(shift / math.pi)
    phase = np.concatenate([tr_o[2], ph_i[1:] + shift])
    nodes = rho[::2]
    tt = t[::2]
    return Trajectory(tt, nodes, nodes * w[::2], y1, y2, phase)


def _outward_only(t, rho, w, tr, ls_end):
    s = np.exp(tr[3] - ls_end)
    return Trajectory(t[::2], rho[::2], rho[::2] * w[::2], tr[0] * s, tr[1] * s, tr[2].copy())


def trajectory_schrodinger(eps: float, l: int, R: float, cfg: IntegratorConfig = DEFAULT_CONFIG,
                           wall_phase: float = None) -> Trajectory:
    """Solution on the integrator nodes.

    Without ``wall_phase`` this is the plain outward solution.  With it, the
    outward piece is glued to the inward wall solution at the turning point,
    which is what one wants for an eigenfunction at large R.
    """
    R = _check_R(R)
    t, rho, w, dt = radial_grid(R, cfg.step_count, cfg.start_fraction)
    L = float(l * (l + 1))
    start = _schr_start(eps, l, rho[0])
    N = cfg.step_count
    if wall_phase is None:
        ph0 = _initial_phase(0, start[0], start[1], rho[0])
        _, _, _, ls, tr = _integrate(0, rho, w, dt, start[0], start[1], L, 0.0, 1.0, float(eps),
                                     0, N, ph0, True)
        return _outward_only(t, rho, w, tr, ls)
    m = _match_index(rho, schrodinger_match_radius(eps, L, R, wall_phase))
    _, out, inn = _run_match(0, rho, w, dt, start, L, 0.0, 1.0, float(eps), float(wall_phase), m, N, True)
    return _glue(t, rho, w, m, out, inn)


def trajectory_dirac(eps: float, k: int, alpha: float, R: float, cfg: IntegratorConfig = DEFAULT_CONFIG,
                     wall_phase: float = None) -> Trajectory:
    """Dirac analogue of :func:`trajectory_schrodinger`; y1 = psi_A, y2 = psi_B."""
    R = _check_R(R)
    t, rho, w, dt = radial_grid(R, cfg.step_count, cfg.start_fraction)
    start = _dirac_start(eps, k, alpha, rho[0])
    N = cfg.step_count
    if wall_phase is None:
        ph0 = _initial_phase(1, start[0], start[1], rho[0])
        _, _, _, ls, tr = _integrate(1, rho, w, dt, start[0], start[1], 0.0, float(k), float(alpha),
                                     float(eps), 0, N, ph0, True)
        return _outward_only(t, rho, w, tr, ls)
    m = _match_index(rho, dirac_turning_radius(eps, k, alpha, R))
    _, out, inn = _run_match(1, rho, w, dt, start, 0.0, float(k), float(alpha), float(eps),
                             float(wall_phase), m, N, True)
    return _glue(t, rho, w, m, out, inn)
