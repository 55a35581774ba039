"""Exact traces of words in Jucys-Murphy elements over the regular representation.

Everything here is exact: permutations are tuples, coefficients are Python
ints or Fractions, and the trace of a group-algebra element is n! times its
identity coefficient.  Products of transposition words are read left to
right (the leftmost transposition acts first), matching the incremental
path construction in ``paths_diagrams``.

Two independent evaluation routes are provided for the moment functionals
and cross-checked in the tests: convolution in the group algebra, and
expectation of content power sums over dimension-weighted tableau chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import chebyshev
from .partitions import Partition, dimension, frobenius

__all__ = [
    "identity_perm",
    "transposition",
    "compose",
    "inverse",
    "cycles",
    "lehmer_rank",
    "lehmer_unrank",
    "GroupAlgebraElement",
    "jm_element",
    "y_element",
    "poly_at_jm",
    "trace_of_word_product",
    "chebyshev_word_trace",
    "enumerate_chains",
    "chain_probability",
    "jm_eigenvalues",
    "tableau_spectrum",
    "content_power_sum",
    "power_sum",
    "ExactRadical",
    "MomentValue",
    "mixed_moment_sym",
    "mixed_moment",
    "modified_moment",
]

GROUP_ALGEBRA_CAP = 9


def identity_perm(n: int) -> tuple:
    return tuple(range(n))


def transposition(a: int, b: int, n: int) -> tuple:
    """The transposition (a b) on 1-based letters, as a 0-based image tuple."""
    if not (1 <= a <= n and 1 <= b <= n and a != b):
        raise ValueError(f"bad transposition ({a} {b}) in S_{n}")
    img = list(range(n))
    img[a - 1], img[b - 1] = b - 1, a - 1
    return tuple(img)


def compose(p: tuple, q: tuple) -> tuple:
    """Apply p first, then q."""
    return tuple(q[x] for x in p)


def inverse(p: tuple) -> tuple:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def cycles(p: tuple) -> list:
    """Cycle decomposition as lists of 0-based points, fixed points included."""
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        x = p[start]
        while x != start:
            cyc.append(x)
            seen[x] = True
            x = p[x]
        out.append(cyc)
    return out


def lehmer_rank(p: tuple) -> int:
    """Lexicographic rank of the permutation via its Lehmer code."""
    n = len(p)
    rank = 0
    for i in range(n):
        smaller = sum(1 for j in range(i + 1, n) if p[j] < p[i])
        rank += smaller * math.factorial(n - 1 - i)
    return rank


def lehmer_unrank(rank: int, n: int) -> tuple:
    avail = list(range(n))
    out = []
    for i in range(n):
        f = math.factorial(n - 1 - i)
        idx, rank = divmod(rank, f)
        out.append(avail.pop(idx))
    return tuple(out)


class GroupAlgebraElement:
    """Sparse element of Q[S_n]: permutation tuple -> exact coefficient."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict | None = None):
        if n > GROUP_ALGEBRA_CAP:
            raise ValueError(f"group algebra capped at n <= {GROUP_ALGEBRA_CAP}")
        self.n = n
        self.terms = {p: c for p, c in (terms or {}).items() if c != 0}

    @classmethod
    def from_permutation(cls, p: tuple, coeff=1) -> "GroupAlgebraElement":
        return cls(len(p), {p: coeff})

    @classmethod
    def scalar(cls, n: int, coeff) -> "GroupAlgebraElement":
        return cls(n, {identity_perm(n): coeff})

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        self._check(other)
        terms = dict(self.terms)
        for p, c in other.terms.items():
            terms[p] = terms.get(p, 0) + c
        return GroupAlgebraElement(self.n, terms)

    def __sub__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        self._check(other)
        terms = dict(self.terms)
        for p, c in other.terms.items():
            terms[p] = terms.get(p, 0) - c
        return GroupAlgebraElement(self.n, terms)

    def scale(self, c) -> "GroupAlgebraElement":
        return GroupAlgebraElement(self.n, {p: c * v for p, v in self.terms.items()})

    def __mul__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        """Convolution; word order (left factor acts first)."""
        self._check(other)
        terms: dict = {}
        for p, cp in self.terms.items():
            for q, cq in other.terms.items():
                r = compose(p, q)
                terms[r] = terms.get(r, 0) + cp * cq
        return GroupAlgebraElement(self.n, terms)

    def trace(self):
        """Trace in the left regular representation: n! x identity coefficient."""
        return self.terms.get(identity_perm(self.n), 0) * math.factorial(self.n)

    def normalized_trace(self) -> Fraction:
        """(1/n!) trace, i.e. the identity coefficient."""
        return Fraction(self.terms.get(identity_perm(self.n), 0))

    def commutes_with(self, other: "GroupAlgebraElement") -> bool:
        return (self * other).terms == (other * self).terms

    def _check(self, other):
        if self.n != other.n:
            raise ValueError(f"mixed degrees {self.n} and {other.n}")

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupAlgebraElement) and self.n == other.n and self.terms == other.terms

    def __repr__(self) -> str:
        return f"GroupAlgebraElement(n={self.n}, {len(self.terms)} terms)"


def trace_of_word_product(a: GroupAlgebraElement, b: GroupAlgebraElement):
    """trace(a * b) without forming the product: n! sum_g a[g] b[g^-1]."""
    a._check(b)
    small, big, invert_small = (a, b, True) if len(a.terms) <= len(b.terms) else (b, a, False)
    total = 0
    for p, c in small.terms.items():
        q = inverse(p)
        cq = big.terms.get(q)
        if cq is not None:
            total += c * cq
    return total * math.factorial(a.n)


def jm_element(k: int, n: int) -> GroupAlgebraElement:
    """X_k = sum_{a<k} (a k); X_1 = 0."""
    if not (1 <= k <= n):
        raise ValueError(f"jm_element needs 1 <= k <= n, got k={k}, n={n}")
    terms = {transposition(a, k, n): 1 for a in range(1, k)}
    return GroupAlgebraElement(n, terms)


def y_element(m: int, r: int, n: int) -> GroupAlgebraElement:
    """Y_{m,r} = sum_{q<=m} X_q^r."""
    if not (1 <= m <= n and r >= 0):
        raise ValueError(f"y_element needs 1 <= m <= n and r >= 0")
    out = GroupAlgebraElement(n)
    for q in range(1, m + 1):
        x = jm_element(q, n)
        if r == 0:
            out = out + GroupAlgebraElement.scalar(n, 1)
            continue
        acc = x
        for _ in range(r - 1):
            acc = acc * x
        out = out + acc
    return out


def poly_at_jm(coeffs, k: int, n: int) -> GroupAlgebraElement:
    """Evaluate a polynomial (ascending integer coefficients) at X_k by Horner."""
    x = jm_element(k, n)
    acc = GroupAlgebraElement.scalar(n, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * x + GroupAlgebraElement.scalar(n, c)
    return acc


def _shifted_letters(tbar, n):
    """Special letters n_p = n - t_p - p + 1 for the p-indexed factors."""
    return [n - t - p for p, t in enumerate(tbar)]


def chebyshev_word_trace(mbar, tbar, n: int) -> Fraction:
    """(1/n!) tr prod_p P_{m_p}^{n_p - 1}(X_{n_p}) with n_p = n - t_p - p + 1.

    This is the group-algebra side of the reduced-word counting identity;
    the combinatorial side is ``paths_diagrams.enumerate_sigma``.
    """
    if len(mbar) != len(tbar):
        raise ValueError("mbar and tbar must have equal length")
    letters = _shifted_letters(tbar, n)
    if any(npv < 1 for npv in letters):
        raise ValueError("shifts exhaust the letters")
    factors = [
        poly_at_jm(chebyshev.p_poly(m, npv - 1).coefficients, npv, n)
        for m, npv in zip(mbar, letters)
    ]
    if len(factors) == 1:
        return factors[0].normalized_trace()
    if len(factors) == 2:
        return Fraction(trace_of_word_product(factors[0], factors[1]), math.factorial(n))
    acc = factors[0]
    for f in factors[1:-1]:
        acc = acc * f
    return Fraction(trace_of_word_product(acc, factors[-1]), math.factorial(n))


@lru_cache(maxsize=8)
def enumerate_chains(n: int) -> tuple:
    """All growth chains (lambda^0 = empty <= ... <= lambda^n), as tuples."""
    if n == 0:
        return ((Partition(()),),)
    out = []
    for chain in enumerate_chains(n - 1):
        top = chain[-1]
        for row in top.outer_corners():
            out.append(chain + (top.add_corner(row),))
    return tuple(out)


def chain_probability(chain) -> Fraction:
    """Probability dim(lambda^n)/n! of the chain under the growth process."""
    n = len(chain) - 1
    return Fraction(dimension(chain[-1]), math.factorial(n))


def jm_eigenvalues(chain) -> tuple:
    """Per-step added-box contents: the action of X_1, ..., X_n on the chain."""
    out = []
    for prev, cur in zip(chain, chain[1:]):
        rows = [r for r in cur.inner_corners() if prev.part(r) == cur.part(r) - 1]
        (row,) = [r for r in rows if cur.remove_corner(r) == prev]
        out.append(cur.part(row) - row)
    return tuple(out)


def power_sum(r: int, l: int) -> int:
    """S_r(l) = sum_{i=1}^{l} i^r."""
    return sum(i**r for i in range(1, l + 1))


def content_power_sum(lam: Partition, r: int) -> int:
    """sum over boxes of ct(box)^r, with 0^0 = 1 so r = 0 counts boxes."""
    if r == 0:
        return lam.size
    fr = frobenius(lam)
    return sum(power_sum(r, f) for f in fr.f) + (-1) ** r * sum(
        power_sum(r, fp) for fp in fr.fprime
    )


def tableau_spectrum(chain, weights) -> int:
    """prod_p Y_{m_p, r_p} acting on the chain: content power sums at prefixes."""
    n = len(chain) - 1
    val = 1
    for m, r in weights:
        if not (1 <= m <= n):
            raise ValueError(f"prefix size {m} out of range")
        val *= content_power_sum(chain[m], r)
    return val


def _squarefree_split(d: int) -> tuple:
    """d = s^2 * f with f squarefree; returns (s, f)."""
    s, f = 1, 1
    m = d
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            f *= p
        p += 1
    return s, f * m


@dataclass(frozen=True)
class ExactRadical:
    """Exact number coeff * sqrt(radicand) with squarefree radicand."""

    coeff: Fraction
    radicand: int = 1

    @classmethod
    def make(cls, coeff, radicand: int = 1) -> "ExactRadical":
        coeff = Fraction(coeff)
        if coeff == 0 or radicand == 0:
            return cls(Fraction(0), 1)
        if radicand < 0:
            raise ValueError("radicand must be non-negative")
        s, f = _squarefree_split(radicand)
        return cls(coeff * s, f)

    def __mul__(self, other: "ExactRadical") -> "ExactRadical":
        return ExactRadical.make(self.coeff * other.coeff, self.radicand * other.radicand)

    def __float__(self) -> float:
        return float(self.coeff) * math.sqrt(self.radicand)


def _half_power(base: int, num: int) -> ExactRadical:
    """base^(num/2) as an exact radical (num may be negative)."""
    if num >= 0:
        coeff = Fraction(base ** (num // 2))
        return ExactRadical.make(coeff, base if num % 2 else 1)
    coeff = Fraction(1, base ** ((-num + 1) // 2))
    return ExactRadical.make(coeff, base if num % 2 else 1)


@dataclass(frozen=True)
class MomentValue:
    """Exact raw trace together with its stated normalization."""

    raw: Fraction
    normalization: ExactRadical

    @property
    def exact(self) -> ExactRadical:
        return ExactRadical.make(self.raw) * self.normalization

    @property
    def value(self) -> float:
        return float(self.exact)


def mixed_moment_sym(rbar, tbar, n: int, route: str = "algebra") -> MomentValue:
    """Symmetric mixed moment: (1/n!) tr prod_p (r_p/(4 n_p)^((r_p+1)/2)) Y_{n_p, r_p}.

    ``route='algebra'`` convolves in the group algebra; ``route='tableau'``
    averages content power sums over dimension-weighted chains.  Both give
    the same exact raw value (this equality is an acceptance criterion).
    Here n_p = n - t_p (no factor-index shift).
    """
    if len(rbar) != len(tbar):
        raise ValueError("rbar and tbar must have equal length")
    nps = [n - t for t in tbar]
    if any(npv < 1 for npv in nps):
        raise ValueError("shifts exhaust the letters")
    if route == "algebra":
        acc = GroupAlgebraElement.scalar(n, 1)
        elems = [y_element(npv, r, n) for npv, r in zip(nps, rbar)]
        if len(elems) == 1:
            raw = elems[0].normalized_trace()
        else:
            for e in elems[:-1]:
                acc = acc * e
            raw = Fraction(trace_of_word_product(acc, elems[-1]), math.factorial(n))
    elif route == "tableau":
        raw = Fraction(0)
        weights = list(zip(nps, rbar))
        for chain in enumerate_chains(n):
            raw += chain_probability(chain) * tableau_spectrum(chain, weights)
    else:
        raise ValueError(f"unknown route {route!r}")
    norm = ExactRadical.make(1)
    for npv, r in zip(nps, rbar):
        norm = norm * ExactRadical.make(Fraction(r)) * _half_power(4 * npv, -(r + 1))
    return MomentValue(raw=raw, normalization=norm)


def mixed_moment(rbar, tbar, n: int) -> MomentValue:
    """Plain mixed moment of JM powers with n_p = n - t_p - p + 1.

    Raw value (1/n!) tr prod_p X_{n_p}^{r_p}; normalization
    prod_p 2^{-r_p} n_p^{(1-r_p)/2}.
    """
    letters = _shifted_letters(tbar, n)
    if any(npv < 1 for npv in letters):
        raise ValueError("shifts exhaust the letters")
    factors = []
    for npv, r in zip(letters, rbar):
        x = jm_element(npv, n)
        acc = GroupAlgebraElement.scalar(n, 1)
        for _ in range(r):
            acc = acc * x
        factors.append(acc)
    if len(factors) == 1:
        raw = factors[0].normalized_trace()
    else:
        acc = factors[0]
        for f in factors[1:-1]:
            acc = acc * f
        raw = Fraction(trace_of_word_product(acc, factors[-1]), math.factorial(n))
    norm = ExactRadical.make(1)
    for npv, r in zip(letters, rbar):
        norm = norm * ExactRadical.make(Fraction(1, 2**r)) * _half_power(npv, 1 - r)
    return MomentValue(raw=raw, normalization=norm)


def modified_moment(mbar, tbar, n: int) -> MomentValue:
    """Chebyshev-modified moment; raw value is the reduced-word count.

    Raw value (1/n!) tr prod_p P_{m_p}^{n_p - 1}(X_{n_p}); normalization
    prod_p n_p^{(1 - m_p)/2}.
    """
    raw = chebyshev_word_trace(mbar, tbar, n)
    norm = ExactRadical.make(1)
    for npv, m in zip(_shifted_letters(tbar, n), mbar):
        norm = norm * _half_power(npv, 1 - m)
    return MomentValue(raw=raw, normalization=norm)
