"""The monic polynomial family P_l^n, its Chebyshev-U relations, and diagnostics.

P_0 = 1, P_1 = x, P_2 = x^2 - n, and P_l = x P_{l-1} - (n-1) P_{l-2} for
l >= 3.  All identity checks are exact: the U-side relations are verified
in the scaled variable y = x / (2 sqrt(n-1)), where both sides have rational
coefficients, so no radicals ever enter.  The family is orthogonal for the
measure (n/2pi) sqrt(4(n-1) - x^2) / (n^2 - x^2) dx, which the Gram
diagnostic integrates with a trigonometric substitution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "PolySpec",
    "p_poly",
    "u_poly",
    "p_scaled",
    "u_from_p",
    "p_from_u",
    "snyder_expand",
    "snyder_reconstruct",
    "kesten_mckay_gram",
    "FAULTS",
]

# Test-only fault injection: recognized tags flip deliberate bugs on.
FAULTS: set = set()
FAULT_P_RECURSION = "p-recursion-off-by-one"


@dataclass(frozen=True)
class PolySpec:
    """Monic integer polynomial of the family, ascending coefficients."""

    l: int
    n: int
    coefficients: tuple

    def __post_init__(self):
        if len(self.coefficients) != self.l + 1 or self.coefficients[-1] != 1:
            raise ValueError("PolySpec must be monic of degree l")
        if any(
            c != 0 for i, c in enumerate(self.coefficients) if (self.l - i) % 2
        ):
            raise ValueError("PolySpec must have the parity of its degree")

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc


def _poly_mul_x(coeffs):
    return (0,) + tuple(coeffs)


def _poly_sub_scaled(a, b, s):
    out = list(a)
    while len(out) < len(b):
        out.append(0)
    for i, c in enumerate(b):
        out[i] -= s * c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


@lru_cache(maxsize=None)
def _p_coeffs(l: int, n: int, faulty: bool) -> tuple:
    if l == 0:
        return (1,)
    if l == 1:
        return (0, 1)
    if l == 2:
        return (-n, 0, 1)
    shift = 2 if faulty else 1
    return _poly_sub_scaled(
        _poly_mul_x(_p_coeffs(l - 1, n, faulty)), _p_coeffs(l - 2, n, faulty), n - shift
    )


def p_poly(l: int, n: int) -> PolySpec:
    """The degree-l member of the family for parameter n."""
    if l < 0 or n < 1:
        raise ValueError("need l >= 0 and n >= 1")
    return PolySpec(l, n, _p_coeffs(l, n, FAULT_P_RECURSION in FAULTS))


@lru_cache(maxsize=None)
def u_poly(l: int) -> tuple:
    """Chebyshev U_l coefficients in y (ascending integers); U_{-1} = U_{-2} = 0."""
    if l < -2:
        raise ValueError("l >= -2 required")
    if l < 0:
        return (0,)
    if l == 0:
        return (1,)
    if l == 1:
        return (0, 2)
    return _poly_sub_scaled(tuple(2 * c for c in _poly_mul_x(u_poly(l - 1))), u_poly(l - 2), 1)


def p_scaled(l: int, n: int) -> tuple:
    """Q_l(y) = P_l^n(2 sqrt(n-1) y) / (n-1)^(l/2), exact rational coefficients.

    Only powers of the same parity as l occur, so the scaling is rational.
    """
    if n < 2:
        raise ValueError("scaled form needs n >= 2")
    coeffs = p_poly(l, n).coefficients
    out = [Fraction(0)] * (l + 1)
    for j, c in enumerate(coeffs):
        if c == 0:
            continue
        # x^j -> (2 sqrt(n-1))^j y^j; divide by (n-1)^(l/2); j = l (mod 2)
        out[j] = Fraction(c) * 2**j * Fraction(n - 1) ** ((j - l) // 2)
    return tuple(out)


def u_from_p(l: int, n: int) -> dict:
    """Expansion of the scaled P_l^n in the U basis: degree -> rational weight.

    Computed by exact triangular elimination against the U family; the
    closed relation (weight 1 on U_l, -1/(n-1) on U_{l-2}) is asserted in
    the tests rather than assumed here.
    """
    rem = list(p_scaled(l, n))
    out = {}
    for deg in range(l, -1, -1):
        if deg >= len(rem) or rem[deg] == 0:
            continue
        u = u_poly(deg)
        w = Fraction(rem[deg], u[deg])
        out[deg] = w
        for i, c in enumerate(u):
            rem[i] -= w * c
    if any(c != 0 for c in rem):
        raise AssertionError("U expansion failed to terminate")
    return out


def p_from_u(l: int, n: int) -> dict:
    """Expansion of U_l in the scaled P basis: degree -> rational weight."""
    rem = [Fraction(c) for c in u_poly(l)]
    out = {}
    for deg in range(l, -1, -1):
        if deg >= len(rem) or rem[deg] == 0:
            continue
        q = p_scaled(deg, n)
        w = Fraction(rem[deg], q[deg])
        out[deg] = w
        for i, c in enumerate(q):
            rem[i] -= w * c
    if any(c != 0 for c in rem):
        raise AssertionError("P expansion failed to terminate")
    return out


def snyder_expand(r: int) -> list:
    """Weights expressing lambda^r as a combination of U polynomials.

    Even r = 2R:  lambda^(2R)   = sum_{m=0}^{R} w_m U_{2m}(lambda),
                  w_m = (2m+1)/((2R+1) 2^(2R)) C(2R+1, R-m).
    Odd  r = 2R-1: lambda^(2R-1) = sum_{m=1}^{R} w_m U_{2m-1}(lambda),
                  w_m = 2m/((2R) 2^(2R-1)) C(2R, R-m).
    Returns (U-degree, weight) pairs with positive weight.
    """
    if r < 1:
        raise ValueError("r >= 1 required")
    out = []
    if r % 2 == 0:
        big = r // 2
        denom = (2 * big + 1) * 2 ** (2 * big)
        for m in range(big + 1):
            w = Fraction((2 * m + 1) * math.comb(2 * big + 1, big - m), denom)
            out.append((2 * m, w))
    else:
        big = (r + 1) // 2
        denom = (2 * big) * 2 ** (2 * big - 1)
        for m in range(1, big + 1):
            w = Fraction(2 * m * math.comb(2 * big, big - m), denom)
            out.append((2 * m - 1, w))
    return out


def snyder_reconstruct(r: int) -> tuple:
    """Polynomial sum of the expansion, for exact comparison with lambda^r."""
    total = [Fraction(0)] * (r + 1)
    for deg, w in snyder_expand(r):
        for i, c in enumerate(u_poly(deg)):
            total[i] += w * c
    return tuple(total)


@lru_cache(maxsize=4)
def _leggauss_cached(nodes: int):
    return np.polynomial.legendre.leggauss(nodes)


def kesten_mckay_gram(l1: int, l2: int, n: int, nodes: int = 2000) -> float:
    """Inner product of P_{l1}^n and P_{l2}^n for the degree-n tree measure.

    Substituting x = 2 sqrt(n-1) sin(theta) removes the endpoint square-root
    singularity; Gauss-Legendre in theta then converges to well below the
    1e-8 diagnostic tolerance.
    """
    if min(l1, l2) < 0 or n < 3:
        raise ValueError("need l >= 0 and n >= 3")
    p1, p2 = p_poly(l1, n), p_poly(l2, n)
    half = 2.0 * math.sqrt(n - 1.0)
    t, w = _leggauss_cached(nodes)
    theta = 0.5 * math.pi * t
    x = half * np.sin(theta)
    dens = (n / (2.0 * math.pi)) * (half * np.cos(theta)) ** 2 / (n * n - x * x)
    vals = np.polyval(list(reversed(p1.coefficients)), x) * np.polyval(
        list(reversed(p2.coefficients)), x
    )
    return float(np.sum(w * 0.5 * math.pi * dens * vals))
