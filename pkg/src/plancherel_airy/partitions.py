"""Exact combinatorics of integer partitions (Young diagrams).

Shapes are stored densely, one integer per row, and are immutable after
construction, so values can be shared freely across threads.  Corner and
coordinate conventions:

* an inner corner is a removable box ``(i, lambda_i)``;
* an outer corner is an addable position ``(i, lambda_i + 1)``;
* the interlacing coordinates name ``iota`` the contents of the *outer*
  (addable) corners and ``o`` the contents of the *inner* (removable)
  corners, so that ``iota_1 > o_1 > iota_2 > ... > iota_c``.  This follows
  the worked numeric convention for (4,3,1): iota = (4,2,-1,-3),
  o = (3,1,-2); see README for a note on the naming ambiguity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

__all__ = [
    "Partition",
    "Corner",
    "FrobeniusCoords",
    "KerovCoords",
    "conjugate",
    "corners",
    "dimension",
    "log_dimension",
    "frobenius",
    "kerov",
    "contains",
    "partitions_of",
]

# Exact big-integer hook products stay cheap up to this size; beyond it the
# caller is expected to use log_dimension.
EXACT_DIMENSION_CAP = 170


class Partition:
    """A non-increasing sequence of positive integers."""

    __slots__ = ("parts", "size", "_conjugate_parts", "_hash")

    def __init__(self, parts: Sequence[int] = ()):
        parts = tuple(int(p) for p in parts if p != 0)
        if any(p < 0 for p in parts):
            raise ValueError(f"parts must be positive, got {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"parts must be non-increasing, got {parts}")
        self.parts = parts
        self.size = sum(parts)
        self._conjugate_parts = None
        self._hash = hash(parts)

    @classmethod
    def from_text(cls, text: str) -> "Partition":
        """Parse the comma-separated text form, e.g. ``"4,3,1"``; "" is empty."""
        text = text.strip()
        if not text:
            return cls(())
        return cls(tuple(int(tok) for tok in text.split(",")))

    def to_text(self) -> str:
        return ",".join(str(p) for p in self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __getitem__(self, i: int) -> int:
        """Row length with zero-padding beyond the last row (1-based rows via part())."""
        return self.parts[i]

    def part(self, i: int) -> int:
        """lambda_i with 1-based i, zero beyond the length."""
        return self.parts[i - 1] if 1 <= i <= len(self.parts) else 0

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self.parts == other.parts

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Partition") -> bool:
        return self.parts < other.parts

    def __repr__(self) -> str:
        return f"Partition({list(self.parts)})"

    @property
    def conjugate_parts(self) -> tuple:
        if self._conjugate_parts is None:
            parts = self.parts
            self._conjugate_parts = tuple(
                _count_ge(parts, j) for j in range(1, (parts[0] if parts else 0) + 1)
            )
        return self._conjugate_parts

    def hook_lengths(self) -> list:
        """Hook length table, row-major, matching the shape."""
        conj = self.conjugate_parts
        return [
            [self.parts[i] - j + conj[j - 1] - i for j in range(1, self.parts[i] + 1)]
            for i in range(len(self.parts))
        ]

    def inner_corners(self) -> list:
        """Rows (1-based) whose last box is removable."""
        parts = self.parts
        return [
            i + 1
            for i in range(len(parts))
            if i + 1 == len(parts) or parts[i] > parts[i + 1]
        ]

    def outer_corners(self) -> list:
        """Rows (1-based) where a box can be added."""
        parts = self.parts
        rows = [i + 1 for i in range(len(parts)) if i == 0 or parts[i - 1] > parts[i]]
        rows.append(len(parts) + 1)
        return rows

    def remove_corner(self, row: int) -> "Partition":
        """Partition with the inner corner in 1-based ``row`` removed."""
        parts = list(self.parts)
        if not (1 <= row <= len(parts)):
            raise ValueError(f"no row {row} in {self}")
        if row < len(parts) and parts[row - 1] == parts[row]:
            raise ValueError(f"row {row} has no inner corner in {self}")
        parts[row - 1] -= 1
        return Partition(parts)

    def add_corner(self, row: int) -> "Partition":
        """Partition with a box added at the outer corner in 1-based ``row``."""
        parts = list(self.parts)
        if row == len(parts) + 1:
            parts.append(1)
        elif 1 <= row <= len(parts) and (row == 1 or parts[row - 2] > parts[row - 1]):
            parts[row - 1] += 1
        else:
            raise ValueError(f"row {row} has no outer corner in {self}")
        return Partition(parts)

    def contents(self) -> Iterator[int]:
        """Contents j - i of all boxes."""
        for i, lam in enumerate(self.parts, start=1):
            for j in range(1, lam + 1):
                yield j - i


def _count_ge(parts: tuple, j: int) -> int:
    # parts are non-increasing; count entries >= j by bisection
    lo, hi = 0, len(parts)
    while lo < hi:
        mid = (lo + hi) // 2
        if parts[mid] >= j:
            lo = mid + 1
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class Corner:
    row: int
    col: int
    kind: str  # "inner" | "outer"
    content: int


@dataclass(frozen=True)
class FrobeniusCoords:
    f: tuple
    fprime: tuple
    d: int


@dataclass(frozen=True)
class KerovCoords:
    iota: tuple  # contents of outer (addable) corners, strictly decreasing
    o: tuple  # contents of inner (removable) corners, strictly decreasing


def conjugate(lam: Partition) -> Partition:
    """Reflected partition, lambda'_j = #{i : lambda_i >= j}."""
    return Partition(lam.conjugate_parts)


def corners(lam: Partition) -> list:
    """All inner and outer corners with contents, sorted by row."""
    out = []
    for row in lam.inner_corners():
        col = lam.part(row)
        out.append(Corner(row, col, "inner", col - row))
    for row in lam.outer_corners():
        col = lam.part(row) + 1
        out.append(Corner(row, col, "outer", col - row))
    out.sort(key=lambda c: (c.row, c.kind != "outer"))
    return out


def dimension(lam: Partition) -> int:
    """Number of standard Young tableaux of the shape (hook-length formula)."""
    n = lam.size
    if n == 0:
        return 1
    hooks = 1
    for row in lam.hook_lengths():
        for h in row:
            hooks *= h
    return math.factorial(n) // hooks


def log_dimension(lam: Partition) -> float:
    """log dimension via lgamma; stable for shapes far beyond exact range."""
    n = lam.size
    if n == 0:
        return 0.0
    total = math.lgamma(n + 1)
    for row in lam.hook_lengths():
        for h in row:
            total -= math.log(h)
    return total


def frobenius(lam: Partition) -> FrobeniusCoords:
    """Arm/leg lengths f_j = lambda_j - j along the diagonal."""
    conj = lam.conjugate_parts
    f = []
    for j, p in enumerate(lam.parts, start=1):
        if p < j:
            break
        f.append(p - j)
    fp = []
    for j, p in enumerate(conj, start=1):
        if p < j:
            break
        fp.append(p - j)
    if len(f) != len(fp):
        raise AssertionError(f"frobenius length mismatch for {lam}")
    return FrobeniusCoords(tuple(f), tuple(fp), len(f))


def kerov(lam: Partition) -> KerovCoords:
    """Interlacing corner contents; iota is the outer (addable) family."""
    iota = tuple(lam.part(row) + 1 - row for row in lam.outer_corners())
    o = tuple(lam.part(row) - row for row in lam.inner_corners())
    return KerovCoords(iota, o)


def contains(mu: Partition, lam: Partition) -> bool:
    """True iff mu_j <= lambda_j for all j."""
    if len(mu) > len(lam):
        return False
    return all(mu.parts[j] <= lam.parts[j] for j in range(len(mu)))


@lru_cache(maxsize=None)
def _partitions_of(n: int, cap: int) -> tuple:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, cap), 0, -1):
        for rest in _partitions_of(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def partitions_of(n: int) -> list:
    """All partitions of n in reverse-lexicographic order."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return [Partition(p) for p in _partitions_of(n, n if n else 1)]
