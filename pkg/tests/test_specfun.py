import math
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from cavityatom.specfun import (ConvergenceError, PoleError, SpecialFunctionError, kummer_m,
                                laguerre_general, laguerre_int, log_gamma)

# reference values from mpmath at 40 digits, frozen
LGAMMA_7_3 = 7.147892523022248692
M_03_17_25 = 1.937816535028867087
L_1p5_1_07 = 1.266420070663134549


def laguerre_exact(k, a, x):
    """Explicit sum with exact rationals."""
    a, x = Fraction(a), Fraction(x)
    total = Fraction(0)
    for i in range(k + 1):
        num = Fraction(1)
        for m in range(k - i):  # C(k+a, k-i)
            num *= (k + a - m)
        for m in range(1, k - i + 1):
            num /= m
        total += (-1) ** i * num * x ** i / math.factorial(i)
    return total


class TestLogGamma:
    def test_one(self):
        assert abs(log_gamma(1)) < 1e-15

    def test_half(self):
        assert log_gamma(0.5).real == pytest.approx(math.log(math.sqrt(math.pi)), abs=1e-14)

    def test_frozen_7_3(self):
        assert log_gamma(7.3).real == pytest.approx(LGAMMA_7_3, rel=1e-14)

    @pytest.mark.parametrize("z", [0, -1, -7])
    def test_poles(self, z):
        with pytest.raises(PoleError):
            log_gamma(z)

    def test_nan_rejected(self):
        with pytest.raises(SpecialFunctionError):
            log_gamma(float("nan"))

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.05, 60.0))
    def test_recurrence(self, x):
        # ln Gamma(x+1) = ln Gamma(x) + ln x
        assert log_gamma(x + 1).real == pytest.approx(log_gamma(x).real + math.log(x), abs=1e-12, rel=1e-13)

    @settings(max_examples=40, deadline=None)
    @given(st.complex_numbers(min_magnitude=0.1, max_magnitude=30, allow_nan=False, allow_infinity=False))
    def test_matches_mpmath_complex(self, z):
        if z.imag == 0 and z.real <= 0 and z.real == int(z.real):
            return
        got = log_gamma(z)
        ref = complex(mp.loggamma(z))
        if z.imag == 0 and z.real < 0:
            # on the cut the imaginary part is +-k*pi depending on the sign of zero; compare Gamma itself
            assert abs(complex(mp.exp(got)) - complex(mp.gamma(z))) <= 1e-11 * abs(complex(mp.gamma(z)))
        else:
            assert abs(got - ref) <= 1e-11 * max(1.0, abs(ref))


class TestKummer:
    def test_zero_argument(self):
        assert kummer_m(0.7, 2.3, 0.0) == 1.0

    def test_terminating(self):
        assert kummer_m(-1, 2, 1) == pytest.approx(0.5, abs=1e-16)

    def test_frozen(self):
        assert kummer_m(0.3, 1.7, 2.5) == pytest.approx(M_03_17_25, rel=1e-14)

    def test_b_pole(self):
        with pytest.raises(PoleError):
            kummer_m(0.5, -2, 1.0)

    def test_nan_rejected(self):
        with pytest.raises(SpecialFunctionError):
            kummer_m(0.5, 1.0, float("nan"))

    def test_term_cap(self):
        with pytest.raises(ConvergenceError):
            kummer_m(0.5, 1.5, 50.0, max_terms=5)

    def test_complex_input_gives_complex(self):
        v = kummer_m(0.5 + 0.2j, 1.5, 1.0)
        assert isinstance(v, complex)
        assert abs(v - complex(mp.hyp1f1(0.5 + 0.2j, 1.5, 1.0))) < 1e-13

    def test_exponential(self):
        # M(a, a, z) = e^z
        assert kummer_m(1.3, 1.3, -4.0) == pytest.approx(math.exp(-4.0), rel=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(-6, 6), st.floats(0.2, 8), st.floats(-20, 20))
    def test_matches_mpmath(self, a, b, z):
        ref = float(mp.hyp1f1(a, b, z, zeroprec=200))
        scale = float(mp.hyp1f1(abs(a), b, abs(z), zeroprec=200))  # bounds the summed magnitudes
        assert abs(kummer_m(a, b, z) - ref) <= 1e-12 * max(1.0, scale)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-4, 4), st.floats(0.5, 6), st.floats(-10, 10))
    def test_contiguity(self, a, b, z):
        # (b-a) M(a-1) + (2a - b + z) M(a) - a M(a+1) = 0
        lhs = (b - a) * kummer_m(a - 1, b, z) + (2 * a - b + z) * kummer_m(a, b, z) - a * kummer_m(a + 1, b, z)
        scale = sum(abs(t) for t in ((b - a) * kummer_m(a - 1, b, z), (2 * a - b + z) * kummer_m(a, b, z),
                                     a * kummer_m(a + 1, b, z)))
        assert abs(lhs) <= 1e-11 * max(1.0, scale)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-4, 4), st.floats(0.5, 6), st.floats(-10, 10))
    def test_derivative(self, a, b, z):
        # dM/dz = (a/b) M(a+1, b+1, z), against a five-point difference
        h = 1e-3
        f = [kummer_m(a, b, z + m * h) for m in (-2, -1, 1, 2)]
        numeric = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
        exact = a / b * kummer_m(a + 1, b + 1, z)
        bound = kummer_m(abs(a) + 5, b, abs(z) + 0.01)
        assert abs(numeric - exact) <= 1e-7 * max(1.0, bound)


class TestLaguerre:
    def test_trivial(self):
        assert laguerre_general(1, 1, 2) == pytest.approx(0.0, abs=1e-14)
        assert laguerre_general(2, 1, 0) == pytest.approx(3.0, abs=1e-14)
        assert laguerre_int(0, 2.7, 5.0) == 1.0
        assert laguerre_int(1, 1, 2) == 0.0

    def test_frozen_fractional_degree(self):
        assert laguerre_general(1.5, 1, 0.7) == pytest.approx(L_1p5_1_07, rel=1e-13)

    def test_int_against_exact_sum(self):
        ref = float(laguerre_exact(5, 3, Fraction(6, 5)))
        assert laguerre_int(5, 3, 1.2) == pytest.approx(ref, rel=1e-14)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 12), st.integers(0, 6), st.fractions(0, 30, max_denominator=50))
    def test_int_exact(self, k, a, x):
        ref = float(laguerre_exact(k, a, x))
        bound = float(laguerre_exact(k, a, -x))  # every term is positive at -x
        assert abs(laguerre_int(k, a, float(x)) - ref) <= 1e-13 * max(1.0, bound)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 8), st.floats(-0.9, 5), st.floats(0, 20))
    def test_general_equals_int(self, k, a, x):
        ref = laguerre_int(k, a, x)
        bound = abs(laguerre_int(k, a, -x))
        assert abs(laguerre_general(k, a, x) - ref) <= 1e-11 * max(1.0, bound)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0, 8), st.floats(-0.5, 4), st.floats(0, 15))
    def test_general_matches_mpmath(self, n, a, x):
        ref = float(mp.laguerre(n, a, x))
        bound = float(mp.laguerre(n, a, -x)) if n == int(n) else abs(ref) + float(mp.hyp1f1(n, a + 1, x))
        assert laguerre_general(n, a, x) == pytest.approx(ref, abs=1e-11 * max(1.0, abs(bound)))

    def test_negative_integer_degree_integer_order(self):
        assert laguerre_general(-1, 1, 0.5) == 0.0

    def test_gamma_pole_degree(self):
        with pytest.raises(PoleError):
            laguerre_general(-2, 1, 0.5)

    def test_bad_inputs(self):
        with pytest.raises(SpecialFunctionError):
            laguerre_int(-1, 0, 1.0)
        with pytest.raises(SpecialFunctionError):
            laguerre_general(1.0, -1.5, 1.0)
        with pytest.raises(SpecialFunctionError):
            laguerre_int(2, 0, float("nan"))
