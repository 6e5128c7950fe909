import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavityatom import oracle
from cavityatom.oracle import IntegratorConfig, match_dirac, match_schrodinger, shoot_dirac, shoot_schrodinger

ALPHA = math.sqrt(15 / 16)
FINE = IntegratorConfig(step_count=40000)

# psi'/psi at R=1 for eps=0.35, l=0 from mpmath with the complex-momentum Kummer form, frozen
POS_ENERGY_RATIO = -2.344126402092608
# psi_B/psi_A at R=4 for eps=0.9, k=+1 from scipy DOP853 (rtol 1e-13, start 1e-9), frozen
DIRAC_RATIO_K1_R4 = 0.46725053337721756


def ratio(res, R):
    return (res.y2 / R) / res.y1


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(step_count=999), dict(step_count=20001), dict(start_fraction=0.0),
                                    dict(start_fraction=2e-3), dict(method_order=6)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            IntegratorConfig(**kw)

    def test_grid_pins_endpoints(self):
        _, rho, w, _ = oracle.radial_grid(7.5, 2000, 1e-6)
        assert rho[0] == pytest.approx(7.5e-6, rel=1e-15) and rho[-1] == 7.5
        assert np.all(np.diff(rho) > 0) and len(rho) == 4001


class TestSchrodingerShot:
    def test_ground_state(self):
        res = shoot_schrodinger(-0.5, 0, 6.0)
        assert ratio(res, 6.0) == pytest.approx(-1.0, abs=1e-8)
        assert res.node_count == 0

    def test_2s_wall_zero(self):
        # the zero sits on the wall, so it is not an interior node
        traj = oracle.trajectory_schrodinger(-0.125, 0, 2.0)
        assert abs(traj.y1[-1]) <= 1e-8 * np.abs(traj.y1).max()
        assert shoot_schrodinger(-0.125, 0, 2.0).node_count == 0
        assert shoot_schrodinger(-0.12, 0, 2.0).node_count == 1

    def test_positive_energy_frozen(self):
        a = shoot_schrodinger(0.35, 0, 1.0)
        b = shoot_schrodinger(0.35, 0, 1.0, FINE)
        assert ratio(a, 1.0) == pytest.approx(POS_ENERGY_RATIO, rel=1e-12)
        assert abs(ratio(a, 1.0) - ratio(b, 1.0)) <= 1e-9

    @pytest.mark.parametrize("eps,l,R", [(-0.3, 0, 3.0), (-0.1, 2, 8.0), (0.4, 1, 2.0), (1.5, 0, 1.0)])
    def test_step_halving_and_start(self, eps, l, R):
        base = ratio(shoot_schrodinger(eps, l, R), R)
        assert abs(ratio(shoot_schrodinger(eps, l, R, FINE), R) - base) <= 1e-9 * (1 + abs(base))
        half = IntegratorConfig(start_fraction=5e-7)
        assert abs(ratio(shoot_schrodinger(eps, l, R, half), R) - base) <= 1e-9 * (1 + abs(base))

    def test_overflow_rescaling(self):
        # exp(sqrt(0.6) * 1000) overflows a double without the rescale
        res = shoot_schrodinger(-0.3, 0, 1000.0)
        assert math.isfinite(res.y1) and math.isfinite(res.y2)
        assert res.log_scale + math.log(abs(res.y1)) > 710

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-0.9, 2.0), st.integers(0, 3), st.floats(0.5, 10))
    def test_nodes_monotone_in_energy(self, eps, l, R):
        lo = shoot_schrodinger(eps, l, R).node_count
        hi = shoot_schrodinger(eps + 0.3, l, R).node_count
        assert hi >= lo

    def test_nodes_match_sign_changes(self):
        traj = oracle.trajectory_schrodinger(2.0, 1, 6.0)
        y = traj.y1[1:]
        signs = np.sign(y[np.abs(y) > 0])
        assert shoot_schrodinger(2.0, 1, 6.0).node_count == int(np.sum(signs[1:] != signs[:-1]))


class TestDiracShot:
    def test_ground_state_ratio(self):
        # infinite-volume 1S1/2: psi_B / psi_A = (s + k) / alpha at every radius
        s = math.sqrt(1 - ALPHA ** 2)
        res = shoot_dirac(0.25, -1, ALPHA, 8.0)
        assert res.y2 / res.y1 == pytest.approx((s - 1) / ALPHA, rel=1e-6)
        assert res.node_count == 0

    def test_nonrelativistic_limit(self):
        # eps = 1 + alpha^2 E_nr with E_nr = -1/2 reproduces psi_A'/psi_A = -1
        a, R = 1e-4, 3.0
        res = shoot_dirac(1 - 0.5 * a * a, -1, a, R)
        log_deriv = (1 + (1 - 0.5 * a * a) + a * a / R) * (res.y2 / res.y1) / a
        assert log_deriv == pytest.approx(-1.0, abs=1e-6)

    def test_frozen_k_plus_one(self):
        a = shoot_dirac(0.9, 1, ALPHA, 4.0)
        b = shoot_dirac(0.9, 1, ALPHA, 4.0, FINE)
        assert a.y2 / a.y1 == pytest.approx(DIRAC_RATIO_K1_R4, rel=1e-11)
        assert abs(a.y2 / a.y1 - b.y2 / b.y1) <= 1e-9

    def test_alpha_domain(self):
        with pytest.raises(ValueError):
            shoot_dirac(0.5, -1, 1.0, 1.0)
        with pytest.raises(ValueError):
            shoot_dirac(0.5, 0, 0.5, 1.0)


class TestMatching:
    # turning point is at 8; far beyond it the outward piece loses the recessive solution
    @pytest.mark.parametrize("r_match", [2.0, 5.0, 8.0, 11.0])
    def test_root_independent_of_match_point(self, r_match):
        m = match_schrodinger(-0.125, 0, 40.0, math.pi, r_match=r_match)
        assert abs(m.mismatch) < 1e-9
        assert m.nodes_at_root() == 1

    def test_count_steps_across_level(self):
        below = match_schrodinger(-0.126, 0, 40.0, math.pi)
        above = match_schrodinger(-0.124, 0, 40.0, math.pi)
        assert (below.count, above.count) == (1, 2)
        assert below.mismatch * above.mismatch < 0

    def test_mismatch_bounded(self):
        for eps in np.linspace(-0.6, 1.0, 17):
            assert abs(match_schrodinger(eps, 1, 60.0, math.pi).mismatch) <= 1.0

    def test_dirac_match(self):
        m = match_dirac(0.25, -1, ALPHA, 60.0, math.pi)
        assert abs(m.mismatch) < 1e-8
        assert m.count == 1 and m.nodes_at_root() == 0

    def test_turning_radius(self):
        assert oracle.turning_radius(-0.5, 0.0, 10.0) == pytest.approx(2.0)
        assert oracle.turning_radius(0.1, 2.0, 10.0) == 10.0
        assert oracle.turning_radius(-0.5, 0.0, 1.5) == 1.5

    def test_glued_trajectory_is_smooth(self):
        t = oracle.trajectory_schrodinger(-0.5, 0, 40.0, wall_phase=math.pi)
        psi = t.y1 / np.abs(t.y1).max()
        # e^{-rho} throughout, including beyond the match point
        ref = np.exp(-t.rho)
        assert np.max(np.abs(psi - ref / ref.max())) < 1e-8
