import math

import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from cavityatom.radial import (BoundaryCondition, CavityProblem, Channel, DomainError, Model, UnitSystem,
                               boundary_fn, boundary_fn_dirac, boundary_fn_pauli, boundary_fn_schrodinger,
                               dirac_energy_infinite, fine_structure_energy, jl_eigenvalue_sq,
                               jl_identity_residual, pauli_effective_bc, quantization_residual_laguerre,
                               schrodinger_closed_form, schrodinger_energy_infinite, wall_phase)

ALPHA = math.sqrt(15 / 16)
S = UnitSystem(Model.SCHRODINGER)
P = UnitSystem(Model.PAULI)
D = UnitSystem(Model.DIRAC, ALPHA)

# mpmath (30 digits) on rho^l e^{-rho/n} M(l+1-n, 2l+2, 2rho/n), frozen
CF_PSI, CF_DPSI = 0.8117356082772903, -0.011954947511973757
# roots of the Laguerre residual found by brentq on n, frozen
NEUMANN_R2_N = 0.7763812990742599
PAULI_R3_N = 1.0859724999585014


def schr(l, bc, R):
    return CavityProblem(S, Channel.schrodinger(l), bc, R)


class TestTypes:
    def test_alpha_only_for_dirac(self):
        with pytest.raises(ValueError):
            UnitSystem(Model.SCHRODINGER, 0.1)
        with pytest.raises(ValueError):
            UnitSystem(Model.DIRAC, 1.2)

    def test_channel_rules(self):
        with pytest.raises(ValueError):
            Channel.pauli(0, -1)
        with pytest.raises(ValueError):
            Channel.dirac(0)
        with pytest.raises(ValueError):
            Channel.pauli_from_j(1, 2.5)
        assert Channel.pauli_from_j(1, 0.5).j_sign == -1

    def test_dirac_labels(self):
        # k < 0 is j = l + 1/2
        s, p = Channel.dirac(-1), Channel.dirac(1)
        assert (s.l_a, s.l_b, s.j) == (0, 1, 0.5)
        assert (p.l_a, p.l_b, p.j) == (1, 0, 0.5)
        assert s.spectroscopic(1) == "1S1/2" and p.spectroscopic(2) == "2P1/2"
        assert Channel.dirac(-2).spectroscopic(2) == "2P3/2"

    def test_principal_labels(self):
        assert Channel.schrodinger(2).principal_label(0) == 3
        assert Channel.dirac(-1).principal_label(1) == 2
        assert Channel.dirac(1).principal_label(0) == 2

    def test_invalid_alpha_and_radius(self):
        with pytest.raises(ValueError):
            UnitSystem(Model.DIRAC, 1.0)
        with pytest.raises(ValueError):
            CavityProblem(S, Channel.schrodinger(0), BoundaryCondition.dirichlet(), -1.0)


class TestBoundaryCondition:
    def test_normalization(self):
        bc = BoundaryCondition(-3.0, -4.0)
        assert (bc.u, bc.v) == (0.6, 0.8)
        with pytest.raises(ValueError):
            BoundaryCondition(0.0, 0.0)
        with pytest.raises(ValueError):
            BoundaryCondition.robin(float("nan"))

    def test_infinite_gamma_is_dirichlet(self):
        assert BoundaryCondition.robin(math.inf) == BoundaryCondition.dirichlet()
        assert BoundaryCondition.robin(-math.inf) == BoundaryCondition.dirichlet()
        assert BoundaryCondition.from_angle(math.pi / 2, 3.0) == BoundaryCondition.dirichlet()
        assert BoundaryCondition.from_angle(math.pi / 2 - 1e-13, 3.0) == BoundaryCondition.dirichlet()

    def test_describe(self):
        assert BoundaryCondition.neumann().describe() == "neumann"
        assert BoundaryCondition.robin(1.0).describe() == "gamma=1.0"

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-1.5, 1.5), st.floats(0.1, 50))
    def test_angle_round_trip(self, theta, R):
        bc = BoundaryCondition.from_angle(theta, R)
        assert bc.angle(R) == pytest.approx(theta, abs=1e-12)
        assert bc.gamma == pytest.approx(math.tan(theta) / R, rel=1e-12, abs=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-20, 20), st.floats(0.5, 20), st.sampled_from([0, 1, 2]))
    def test_wall_phase_solves_condition(self, gamma, R, l):
        # the wall angle of (rho psi, psi + rho psi') satisfies gamma psi + psi' = 0
        prob = schr(l, BoundaryCondition.robin(gamma), R)
        th = wall_phase(prob)
        assert 0 < th <= math.pi
        U, V = math.sin(th), math.cos(th)   # U = R psi, V = psi + R psi'
        psi = U / R
        dpsi = (V - psi) / R
        assert abs(gamma * psi + dpsi) <= 1e-12 * (1 + abs(gamma)) * max(abs(psi), abs(dpsi), 1 / R)


class TestClosedForm:
    @pytest.mark.parametrize("rho", [0.1, 1.0, 3.7, 12.0])
    def test_ground_state_log_derivative(self, rho):
        p = schrodinger_closed_form(-0.5, 0, rho)
        assert p.dpsi / p.psi == pytest.approx(-1.0, abs=1e-13)

    def test_2s_node(self):
        assert abs(schrodinger_closed_form(-0.125, 0, 2.0).psi) < 1e-15

    def test_frozen_l1(self):
        p = schrodinger_closed_form(-0.2, 1, 3.0)
        assert p.psi == pytest.approx(CF_PSI, rel=1e-13)
        assert p.dpsi == pytest.approx(CF_DPSI, rel=1e-11)

    def test_positive_energy_rejected(self):
        with pytest.raises(DomainError):
            schrodinger_closed_form(0.1, 0, 1.0)


class TestBoundaryFunctions:
    def test_2s_node_root(self):
        assert abs(boundary_fn_schrodinger(schr(0, BoundaryCondition.dirichlet(), 2.0), -0.125)) < 1e-14

    def test_large_R_ground_root(self):
        prob = schr(0, BoundaryCondition.dirichlet(), 40.0)
        root = brentq(lambda e: boundary_fn(prob, e), -0.51, -0.49, xtol=1e-14)
        assert root == pytest.approx(-0.5, abs=1e-10)

    def test_neumann_lowest_root(self):
        prob = schr(0, BoundaryCondition.neumann(), 2.0)
        e_ref = -0.5 / NEUMANN_R2_N ** 2
        assert abs(boundary_fn(prob, e_ref)) < 1e-12
        root = brentq(lambda e: boundary_fn_schrodinger(prob, e, engine="shooting"), -0.9, -0.7, xtol=1e-14)
        assert root == pytest.approx(e_ref, abs=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-0.95, -0.01), st.integers(0, 3), st.floats(0.5, 8.0))
    def test_engines_agree(self, eps, l, R):
        cf = schrodinger_closed_form(eps, l, R)
        from cavityatom import oracle
        sh = oracle.shoot_schrodinger(eps, l, R)
        r_cf = cf.dpsi / cf.psi
        r_sh = (sh.y2 / R) / sh.y1
        assert abs(r_sh - r_cf) <= 1e-8 * (1 + abs(r_cf))

    def test_pauli_l0_equals_schrodinger(self):
        for bc in (BoundaryCondition.robin(0.7), BoundaryCondition.neumann(), BoundaryCondition.dirichlet()):
            a = CavityProblem(P, Channel.pauli(0, 1), bc, 3.0)
            b = schr(0, bc, 3.0)
            for e in (-0.4, -0.1, 0.3):
                assert boundary_fn_pauli(a, e) == boundary_fn_schrodinger(b, e)

    def test_pauli_effective_gamma(self):
        bc = BoundaryCondition.robin(0.5)
        assert pauli_effective_bc(Channel.pauli(2, 1), bc, 4.0).gamma == pytest.approx(0.5 - 2 / 4)
        assert pauli_effective_bc(Channel.pauli(2, -1), bc, 4.0).gamma == pytest.approx(0.5 + 3 / 4)
        assert pauli_effective_bc(Channel.pauli(2, 1), BoundaryCondition.dirichlet(), 4.0).is_dirichlet

    def test_pauli_shared_root(self):
        bc = BoundaryCondition.robin(-1 / 12)
        a = CavityProblem(P, Channel.pauli_from_j(1, 0.5), bc, 12.0)
        b = CavityProblem(P, Channel.pauli_from_j(3, 3.5), bc, 12.0)
        root = brentq(lambda e: boundary_fn(a, e), -0.14, -0.11, xtol=1e-15)
        assert abs(boundary_fn(b, root)) < 1e-9

    def test_pauli_neumann_frozen(self):
        prob = CavityProblem(P, Channel.pauli_from_j(1, 1.5), BoundaryCondition.neumann(), 3.0)
        assert abs(boundary_fn(prob, -0.5 / PAULI_R3_N ** 2)) < 1e-12

    def test_dirac_alpha_domain(self):
        prob = CavityProblem(UnitSystem(Model.DIRAC, 0.5), Channel.dirac(-1), BoundaryCondition.dirichlet(), 1.0)
        assert math.isfinite(boundary_fn_dirac(prob, 0.9))

    def test_dirac_large_R_ground(self):
        prob = CavityProblem(D, Channel.dirac(-1), BoundaryCondition.dirichlet(), 30.0)
        root = brentq(lambda e: boundary_fn(prob, e), 0.2, 0.3, xtol=1e-14)
        assert root == pytest.approx(0.25, abs=1e-8)


class TestLaguerreResidual:
    def test_2s_at_R2(self):
        assert abs(quantization_residual_laguerre(schr(0, BoundaryCondition.dirichlet(), 2.0), 2.0)) < 1e-14

    def test_3p_at_R6(self):
        assert abs(quantization_residual_laguerre(schr(1, BoundaryCondition.dirichlet(), 6.0), 3.0)) < 1e-13

    def test_gamma1_ground(self):
        # e^{-rho} satisfies psi' + psi = 0 everywhere
        prob = schr(0, BoundaryCondition.robin(1.0), 2.0)
        n = brentq(lambda n: quantization_residual_laguerre(prob, n), 0.8, 1.3, xtol=1e-15)
        assert n == pytest.approx(1.0, abs=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            quantization_residual_laguerre(schr(2, BoundaryCondition.dirichlet(), 2.0), 1.5)


class TestInfiniteVolume:
    def test_schrodinger(self):
        assert schrodinger_energy_infinite(2) == -0.125

    def test_dirac_values(self):
        assert dirac_energy_infinite(1, -1, ALPHA) == pytest.approx(0.25, abs=1e-15)
        assert dirac_energy_infinite(2, -1, ALPHA) == pytest.approx(math.sqrt(5 / 8), abs=1e-15)
        assert dirac_energy_infinite(2, 1, ALPHA) == dirac_energy_infinite(2, -1, ALPHA)

    def test_dirac_invalid(self):
        with pytest.raises(ValueError):
            dirac_energy_infinite(1, 1, 0.5)
        with pytest.raises(DomainError):
            dirac_energy_infinite(2, -1, 1.0)

    def test_fine_structure_order(self):
        # |exact - expansion| = C alpha^6 with C settling as alpha -> 0
        cs = [abs(dirac_energy_infinite(2, -1, a) - fine_structure_energy(2, 0.5, a)) / a ** 6
              for a in (0.2, 0.1, 0.05, 0.025)]
        steps = [abs(b - a) for a, b in zip(cs, cs[1:])]
        # the correction to C is O(alpha^2): each halving shrinks the change about fourfold
        assert all(s2 < 0.3 * s1 for s1, s2 in zip(steps, steps[1:]))
        assert cs[-1] == pytest.approx(cs[-2], rel=2e-3)

    def test_fine_structure_rest_and_j(self):
        assert fine_structure_energy(1, 0.5, 0.0) == 1.0
        assert fine_structure_energy(2, 1.5, 0.1) > fine_structure_energy(2, 0.5, 0.1)

    def test_jl_values(self):
        assert jl_eigenvalue_sq(1, 1, 0.3) == 0.0
        assert jl_eigenvalue_sq(1, -1, ALPHA) == 0.0
        assert jl_eigenvalue_sq(2, -1, ALPHA) == pytest.approx(9 / 16, abs=1e-15)

    @pytest.mark.parametrize("alpha", [0.2, 0.5, ALPHA])
    def test_jl_identity_and_pairing(self, alpha):
        for k in range(1, 5):
            for n in range(k, 6):
                assert jl_identity_residual(n, k, alpha) <= 1e-12
                assert jl_eigenvalue_sq(n, k, alpha) == jl_eigenvalue_sq(n, -k, alpha)
