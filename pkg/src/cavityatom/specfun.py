"""Special functions: log-gamma, Kummer's M(a, b, z) and generalized Laguerre functions.

Everything here is scalar and pure.  Complex arguments are plain Python
``complex``; real-only routines accept ``float``.
"""

from __future__ import annotations

import cmath
import math

from scipy import special

__all__ = [
    "SpecialFunctionError",
    "PoleError",
    "ConvergenceError",
    "log_gamma",
    "kummer_m",
    "laguerre_general",
    "laguerre_int",
]

KUMMER_Z_BOUND = 400.0
KUMMER_TERM_CAP = 5000


class SpecialFunctionError(ValueError):
    pass


class PoleError(SpecialFunctionError):
    """Argument sits on a pole of Gamma or of the Kummer series."""


class ConvergenceError(SpecialFunctionError):
    pass


def _as_complex(z) -> complex:
    z = complex(z)
    if math.isnan(z.real) or math.isnan(z.imag):
        raise SpecialFunctionError("NaN argument")
    if math.isinf(z.real) or math.isinf(z.imag):
        raise SpecialFunctionError("non-finite argument")
    return z


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def log_gamma(z) -> complex:
    """Principal branch of ln Gamma(z).

    Raises :class:`PoleError` at z = 0, -1, -2, ...
    """
    z = _as_complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z.real:g}")
    return complex(special.loggamma(z))


class _Neumaier:
    """Compensated running sum for real or complex terms."""

    __slots__ = ("s", "c")

    def __init__(self, first):
        self.s = first
        self.c = 0.0 * first

    def add(self, x):
        t = self.s + x
        if isinstance(t, complex):
            self.c += complex(_comp(self.s.real, x.real, t.real), _comp(self.s.imag, x.imag, t.imag))
        else:
            self.c += _comp(self.s, x, t)
        self.s = t

    @property
    def value(self):
        return self.s + self.c


def _comp(s: float, x: float, t: float) -> float:
    if abs(s) >= abs(x):
        return (s - t) + x
    return (x - t) + s


def kummer_m(a, b, z, *, z_bound: float = KUMMER_Z_BOUND, max_terms: int = KUMMER_TERM_CAP,
             rtol: float = 1e-17):
    """Confluent hypergeometric function M(a, b, z) = sum_k (a)_k / (b)_k z^k / k!.

    Evaluated by direct summation of the power series.  The series terminates
    exactly when ``a`` is a non-positive integer.  Real inputs give a ``float``,
    anything complex gives a ``complex``.

    Raises
    ------
    PoleError
        if ``b`` is 0, -1, -2, ...
    ConvergenceError
        if the term cap is hit before the tail drops below ``rtol``.
    """
    real_input = all(isinstance(v, (int, float)) for v in (a, b, z))
    a, b, z = _as_complex(a), _as_complex(b), _as_complex(z)
    if _is_nonpositive_integer(b):
        raise PoleError(f"M(a, b, z) undefined for b = {b.real:g}")
    if abs(z) > z_bound:
        raise SpecialFunctionError(f"|z| = {abs(z):g} exceeds the supported bound {z_bound:g}")
    if real_input:
        a, b, z = a.real, b.real, z.real

    terminating = _is_nonpositive_integer(complex(a))
    term = 1.0 if real_input else complex(1.0)
    acc = _Neumaier(term)
    # terms may grow until k ~ |z| + |a|; only test the tail past that point
    turn = abs(z) + abs(a) + 1.0
    small = 0
    biggest = 1.0
    for k in range(max_terms):
        term = term * (a + k) / (b + k) * z / (k + 1)
        if term == 0:
            return acc.value
        acc.add(term)
        if terminating:
            continue
        biggest = max(biggest, abs(term))
        # the sum can cancel to ~0 near a root; the largest term sets the noise floor
        if k + 1 > turn and abs(term) <= rtol * max(abs(acc.s), 1e-6 * biggest):
            small += 1
            if small >= 2:
                return acc.value
        else:
            small = 0
    if terminating:
        return acc.value
    raise ConvergenceError(f"Kummer series did not converge in {max_terms} terms "
                           f"(a={a}, b={b}, z={z})")


def _check_real(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise SpecialFunctionError(f"{name} must be finite, got {x}")
    return x


def laguerre_general(degree: float, order: float, x: float) -> float:
    """Generalized Laguerre function L^order_degree(x) for real, possibly non-integer degree.

    Uses L^b_a(x) = Gamma(a+b+1) / (Gamma(a+1) Gamma(b+1)) * M(-a, b+1, x).
    The 1/Gamma(a+1) factor is taken from the entire reciprocal gamma, so
    negative-integer degrees with integer order evaluate to zero.
    """
    degree = _check_real(degree, "degree")
    order = _check_real(order, "order")
    x = _check_real(x, "x")
    if order <= -1.0:
        raise SpecialFunctionError(f"order must exceed -1, got {order}")
    neg_int_degree = degree < 0 and degree == math.floor(degree)
    if neg_int_degree and order != math.floor(order):
        raise PoleError(f"degree {degree:g} with non-integer order {order:g} is a gamma pole case")
    top = degree + order + 1.0
    if top <= 0 and top == math.floor(top):
        raise PoleError(f"Gamma(degree + order + 1) has a pole (argument {top:g})")

    lg = log_gamma(top) - log_gamma(order + 1.0)
    prefactor = cmath.exp(lg).real * float(special.rgamma(degree + 1.0))
    if prefactor == 0.0:
        return 0.0
    return prefactor * kummer_m(-degree, order + 1.0, x)


def laguerre_int(k: int, order: float, x: float) -> float:
    """Associated Laguerre polynomial L^order_k(x) by the three-term recurrence."""
    if int(k) != k or k < 0:
        raise SpecialFunctionError(f"degree must be a non-negative integer, got {k}")
    k = int(k)
    order = _check_real(order, "order")
    x = _check_real(x, "x")
    prev, cur = 1.0, 1.0 + order - x
    if k == 0:
        return prev
    for m in range(1, k):
        prev, cur = cur, ((2 * m + 1 + order - x) * cur - (m + order) * prev) / (m + 1)
    return cur
