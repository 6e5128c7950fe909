import math

import numpy as np
import pytest

from cavityatom.eigensolve import (Engine, NoSignChangeError, WindowTooSmallError, eigenfunction, find_level,
                                   locate_degeneracy, orthogonality_check, probe, problem_at, scan_levels, sweep)
from cavityatom.oracle import IntegratorConfig
from cavityatom.radial import (BoundaryCondition, CavityProblem, Channel, Model, UnitSystem,
                               schrodinger_energy_infinite)

ALPHA = math.sqrt(15 / 16)
S = UnitSystem(Model.SCHRODINGER)
P = UnitSystem(Model.PAULI)
D = UnitSystem(Model.DIRAC, ALPHA)
DIRICHLET = BoundaryCondition.dirichlet()

# lowest Dirac k=-1 level at R=5 (Dirichlet); 20000 and 40000 steps agree to 3e-15, frozen
DIRAC_R5_GROUND = 0.2502448144214486


def schr(l, bc, R):
    return CavityProblem(S, Channel.schrodinger(l), bc, R)


def dirac(k, bc, R, alpha=ALPHA):
    return CavityProblem(UnitSystem(Model.DIRAC, alpha), Channel.dirac(k), bc, R)


class TestScanLevels:
    def test_hydrogen_limit(self):
        spec = scan_levels(schr(0, DIRICHLET, 40.0), max_levels=2)
        assert spec.energies == pytest.approx([-0.5, -0.125], abs=1e-8)
        assert [lv.node_count for lv in spec.levels] == [0, 1]
        assert [lv.principal_label for lv in spec.levels] == [1, 2]
        assert all(lv.engine is Engine.BOTH for lv in spec.levels)

    def test_2s_wall_node(self):
        # the infinite-volume 2s zero lies on the wall at R=2: nodeless cavity ground state
        lv = scan_levels(schr(0, DIRICHLET, 2.0), max_levels=1).levels[0]
        assert lv.energy == pytest.approx(-0.125, abs=1e-9)
        assert lv.node_count == 0

    def test_dirac_limit(self):
        lv = scan_levels(dirac(-1, DIRICHLET, 60.0), (0.0, 0.99), 1).levels[0]
        assert lv.energy == pytest.approx(0.25, abs=1e-6)
        assert lv.label == "1S1/2" and lv.engine is Engine.SHOOTING

    def test_dirac_frozen(self):
        assert find_level(dirac(-1, DIRICHLET, 5.0), 0).energy == pytest.approx(DIRAC_R5_GROUND, abs=1e-12)

    def test_nonrelativistic_limit(self):
        # relativistic shift is O(alpha^2); below alpha ~ 0.01 one ulp of eps exceeds the residual bound
        a = 1e-2
        lv = find_level(dirac(-1, DIRICHLET, 4.0, a), 0)
        schr_lv = find_level(schr(0, DIRICHLET, 4.0), 0)
        assert (lv.energy - 1) / a ** 2 == pytest.approx(schr_lv.energy, rel=1e-4)

    @pytest.mark.parametrize("bc", [DIRICHLET, BoundaryCondition.neumann(), BoundaryCondition.robin(-0.7),
                                    BoundaryCondition.robin(3.0)])
    @pytest.mark.parametrize("l,R", [(0, 1.0), (1, 5.0), (2, 15.0)])
    def test_completeness_and_residuals(self, bc, l, R):
        spec = scan_levels(schr(l, bc, R), (-0.6, 3.0), grid_points=60, auto_extend=True)
        nodes = [lv.node_count for lv in spec.levels]
        assert nodes == list(range(nodes[0], nodes[0] + len(nodes)))
        assert nodes[0] == 0
        assert all(abs(lv.residual) <= 1e-9 for lv in spec.levels)
        assert np.all(np.diff(spec.energies) > 0)

    def test_count_steps_by_one(self):
        # oscillation count: non-decreasing, +1 across each level
        prob = schr(1, BoundaryCondition.robin(0.4), 7.0)
        levels = scan_levels(prob, (-0.3, 1.0)).energies
        grid = np.linspace(-0.3, 1.0, 300)
        counts = [probe(prob, e).count for e in grid]
        assert all(b >= a for a, b in zip(counts, counts[1:]))
        for e, c in zip(grid, counts):
            assert c == sum(1 for x in levels if x < e) + counts[0]

    def test_window_too_small(self):
        with pytest.raises(WindowTooSmallError) as info:
            scan_levels(schr(0, DIRICHLET, 40.0), (-0.6, -0.2), max_levels=2)
        assert len(info.value.spectrum.levels) == 1

    def test_empty_window(self):
        with pytest.raises(ValueError):
            scan_levels(schr(0, DIRICHLET, 2.0), (1.0, 0.0))

    def test_step_halving(self):
        fine = IntegratorConfig(step_count=40000)
        for prob in (schr(0, BoundaryCondition.robin(1.0), 2.0), schr(2, BoundaryCondition.neumann(), 9.0),
                     CavityProblem(P, Channel.pauli(1, -1), BoundaryCondition.robin(-1 / 12), 12.0)):
            a = scan_levels(prob, (-0.6, 1.5), closed_form=False).energies
            b = scan_levels(prob, (-0.6, 1.5), closed_form=False, cfg=fine).energies
            assert np.max(np.abs(np.subtract(a, b))) <= 1e-9

    def test_large_R_convergence(self):
        for l, node in ((0, 0), (0, 1), (1, 0)):
            exact = schrodinger_energy_infinite(node + l + 1)
            errs = [abs(find_level(schr(l, DIRICHLET, R), node).energy - exact) for R in (20.0, 25.0, 30.0, 40.0)]
            assert all(b < a for a, b in zip(errs, errs[1:])) or errs[-1] < 1e-12


class TestFindLevel:
    def test_matches_scan(self):
        prob = schr(1, BoundaryCondition.robin(0.3), 6.0)
        spec = scan_levels(prob, max_levels=3, auto_extend=True)
        for lv in spec.levels:
            assert find_level(prob, lv.node_count).energy == pytest.approx(lv.energy, abs=1e-12)


class TestSweep:
    def test_threads_are_deterministic(self):
        tmpl = schr(0, BoundaryCondition.robin(0.5), 1.0)
        grid = list(np.linspace(0.1, 1.0, 8))
        a = sweep(tmpl, "inverse_radius", grid, max_levels=2, auto_extend=True, grid_points=24, threads=1)
        b = sweep(tmpl, "inverse_radius", grid, max_levels=2, auto_extend=True, grid_points=24, threads=4)
        assert [p.spectrum.energies for p in a] == [p.spectrum.energies for p in b]

    def test_angle_endpoint_is_dirichlet(self):
        tmpl = schr(2, BoundaryCondition.neumann(), 3.0)
        pts = sweep(tmpl, "gamma_angle", [0.0, math.pi / 2], max_levels=2, auto_extend=True)
        ref = scan_levels(schr(2, DIRICHLET, 3.0), max_levels=2, auto_extend=True, cross_check=False)
        assert pts[-1].spectrum.energies == ref.energies
        assert problem_at(tmpl, "gamma_angle", 0.0).bc == BoundaryCondition.neumann()

    def test_unsorted_grid(self):
        with pytest.raises(ValueError):
            sweep(schr(0, DIRICHLET, 1.0), "radius", [2.0, 1.0])

    def test_failures_are_recorded(self):
        pts = sweep(schr(0, DIRICHLET, 1.0), "radius", [2.0, 40.0], window=(-0.6, -0.3), max_levels=2)
        assert pts[0].error is not None and pts[1].error is not None
        assert pts[1].spectrum is not None and len(pts[1].spectrum.levels) == 1


class TestDegeneracy:
    def test_dirichlet_R2(self):
        d = locate_degeneracy(schr(0, DIRICHLET, 1.9), Channel.schrodinger(0), 1, Channel.schrodinger(2), 0,
                              "radius", (1.6, 2.4))
        assert d.value == pytest.approx(2.0, abs=1e-6)
        assert abs(d.splitting) < 1e-9

    def test_dirichlet_R6(self):
        d = locate_degeneracy(schr(1, DIRICHLET, 6.0), Channel.schrodinger(1), 1, Channel.schrodinger(3), 0,
                              "radius", (5.0, 7.0))
        assert d.value == pytest.approx(6.0, abs=1e-6)

    def test_robin_gamma(self):
        d = locate_degeneracy(schr(0, DIRICHLET, 2.0), Channel.schrodinger(0), 2, Channel.schrodinger(2), 1,
                              "gamma", (0.8, 1.2))
        assert d.value == pytest.approx(1.0, abs=1e-6)

    def test_no_sign_change(self):
        with pytest.raises(NoSignChangeError):
            locate_degeneracy(schr(0, DIRICHLET, 2.0), Channel.schrodinger(0), 1, Channel.schrodinger(2), 0,
                              "radius", (2.5, 3.0))


class TestOrthogonality:
    def test_self_overlap(self):
        prob = schr(0, DIRICHLET, 2.0)
        lv = find_level(prob, 0)
        assert orthogonality_check(prob, lv, lv) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("prob", [
        schr(0, DIRICHLET, 2.0),
        schr(1, BoundaryCondition.robin(-0.4), 10.0),
        schr(0, DIRICHLET, 40.0),
        CavityProblem(P, Channel.pauli(2, -1), BoundaryCondition.robin(0.3), 6.0),
        dirac(-1, BoundaryCondition.from_nu(1.0), 5.0),
        dirac(2, BoundaryCondition.from_nu(0.0), 3.0),
    ], ids=["schr-R2", "robin", "R40", "pauli", "dirac-nu1", "dirac-nu0"])
    def test_distinct_levels_orthogonal(self, prob):
        window = (0.0, 5.0) if prob.model is Model.DIRAC else None
        levels = scan_levels(prob, window, max_levels=3, auto_extend=True).levels
        for i in range(3):
            for j in range(i + 1, 3):
                assert orthogonality_check(prob, levels[i], levels[j]) <= 1e-7

    def test_eigenfunction_shape(self):
        prob = schr(0, DIRICHLET, 40.0)
        traj = eigenfunction(prob, find_level(prob, 0))
        psi = traj.y1 / np.abs(traj.y1).max()
        ref = np.exp(-traj.rho)
        assert np.max(np.abs(psi - ref / ref.max())) < 1e-7
