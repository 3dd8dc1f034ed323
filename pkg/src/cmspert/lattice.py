"""Weight lattice of type A_{N-1}: dominant weights, dominance order, spectrum values.

A dominant weight is stored through its canonical partition (N weakly
decreasing nonnegative integers whose last entry is 0).  The traceless
coordinates are recovered by subtracting the mean, so that

    coords[i] = parts[i] - |parts| / N.

All arithmetic here is exact (``fractions.Fraction``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

__all__ = [
    "DominantWeight",
    "CouplingData",
    "dominance_leq",
    "weight_inner",
    "rho_and_e0",
    "trig_eigenvalue",
    "weyl_orbit",
    "orbit_size",
    "stabilizer_order",
    "highest_root",
    "fundamental_weight",
    "partitions",
    "dominated_partitions",
    "basis_sort_key",
    "same_coset",
    "lift_partition",
    "parse_rational",
    "partition_orbit",
    "sorted_weights",
    "fundamental_gram",
    "pairing_denominator",
]


def _check_partition(parts: Sequence[int]) -> None:
    if len(parts) == 0:
        raise ValueError("a partition needs N >= 1 entries")
    for x in parts:
        if int(x) != x:
            raise ValueError(f"non-integer part in {tuple(parts)}")
    if parts[-1] < 0:
        raise ValueError(f"negative part in {tuple(parts)}")
    for a, b in zip(parts, parts[1:]):
        if a < b:
            raise ValueError(f"{tuple(parts)} is not weakly decreasing")


@dataclass(frozen=True)
class DominantWeight:
    """Dominant weight of A_{N-1}, keyed by its canonical partition.

    ``DominantWeight((3, 1, 1))`` and ``DominantWeight((2, 0, 0))`` are the
    same weight; the stored ``parts`` is always the form with last entry 0.
    """

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(int(x) for x in self.parts)
        _check_partition(parts)
        shift = parts[-1]
        object.__setattr__(self, "parts", tuple(x - shift for x in parts))

    @classmethod
    def zero(cls, N: int) -> "DominantWeight":
        return cls((0,) * N)

    @classmethod
    def from_coords(cls, coords: Sequence[Fraction | int]) -> "DominantWeight":
        """Build from traceless coordinates; rejects non-dominant or non-weight input."""
        coords = [Fraction(c) for c in coords]
        if sum(coords) != 0:
            raise ValueError(f"coordinates {coords} do not sum to zero")
        parts = []
        for c in coords:
            d = c - coords[-1]
            if d.denominator != 1:
                raise ValueError(f"coordinate differences of {coords} are not integral")
            parts.append(int(d))
        return cls(tuple(parts))

    @property
    def N(self) -> int:
        return len(self.parts)

    @property
    def size(self) -> int:
        """|λ|⋆ of the canonical partition."""
        return sum(self.parts)

    @property
    def shift(self) -> Fraction:
        return Fraction(self.size, self.N)

    @property
    def coords(self) -> tuple[Fraction, ...]:
        s = self.shift
        return tuple(x - s for x in self.parts)

    def __add__(self, other: "DominantWeight") -> "DominantWeight":
        _same_rank(self, other)
        return DominantWeight(tuple(a + b for a, b in zip(self.parts, other.parts)))

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.parts)


@dataclass(frozen=True)
class CouplingData:
    """Rank and coupling of the model; ``beta`` is the common coupling k_α."""

    N: int
    beta: Fraction

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N}")
        beta = Fraction(self.beta)
        if beta <= 0:
            raise ValueError(f"beta must be positive, got {beta}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "beta", beta)

    @property
    def k_num(self) -> int:
        return self.beta.numerator

    @property
    def k_den(self) -> int:
        return self.beta.denominator


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"a/b"``, an integer or a terminating decimal into a Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def _same_rank(a: DominantWeight, b: DominantWeight) -> None:
    if a.N != b.N:
        raise ValueError(f"rank mismatch: N={a.N} vs N={b.N}")


def same_coset(a: DominantWeight, b: DominantWeight) -> bool:
    """True iff a - b lies in the root lattice Q."""
    _same_rank(a, b)
    return (a.size - b.size) % a.N == 0


def lift_partition(parts: Sequence[int], size: int) -> tuple[int, ...]:
    """Shift ``parts`` by a constant so that it sums to ``size``."""
    N = len(parts)
    d = size - sum(parts)
    if d % N:
        raise ValueError(f"cannot lift {tuple(parts)} to size {size}")
    c = d // N
    return tuple(x + c for x in parts)


def _prefix_leq(a: Sequence[int], b: Sequence[int]) -> bool:
    sa = sb = 0
    for x, y in zip(a, b):
        sa += x
        sb += y
        if sa > sb:
            return False
    return sa == sb


def dominance_leq(a: DominantWeight, b: DominantWeight) -> bool:
    """a ⪯ b, i.e. b - a is a nonnegative integer combination of simple roots."""
    _same_rank(a, b)
    if not same_coset(a, b):
        return False
    n = max(a.size, b.size)
    return _prefix_leq(lift_partition(a.parts, n), lift_partition(b.parts, n))


def weight_inner(a: DominantWeight, b: DominantWeight) -> Fraction:
    _same_rank(a, b)
    return sum((x * y for x, y in zip(a.coords, b.coords)), Fraction(0))


def rho_and_e0(c: CouplingData) -> tuple[tuple[Fraction, ...], Fraction]:
    """ρ(k) in ε-coordinates and the constant e₀ = N(N-1)β(β-1)/6.

    ρ is returned as a coordinate tuple: for non-integral β it is not an
    integral weight, so it cannot be a :class:`DominantWeight`.
    """
    N, beta = c.N, c.beta
    rho = tuple(beta * Fraction(N + 1 - 2 * i, 2) for i in range(1, N + 1))
    e0 = Fraction(N * (N - 1)) * beta * (beta - 1) / 6
    return rho, e0


def trig_eigenvalue(lam: DominantWeight, c: CouplingData) -> Fraction:
    """E_λ = (λ+ρ|λ+ρ) - e₀."""
    if lam.N != c.N:
        raise ValueError(f"rank mismatch: weight has N={lam.N}, coupling N={c.N}")
    return _trig_eigenvalue(lam.parts, c.beta)


@lru_cache(maxsize=None)
def _trig_eigenvalue(parts: tuple[int, ...], beta: Fraction) -> Fraction:
    N = len(parts)
    s = Fraction(sum(parts), N)
    total = Fraction(0)
    for i, x in enumerate(parts, start=1):
        v = x - s + beta * Fraction(N + 1 - 2 * i, 2)
        total += v * v
    return total - Fraction(N * (N - 1)) * beta * (beta - 1) / 6


def stabilizer_order(vec: Sequence) -> int:
    counts: dict = {}
    for x in vec:
        counts[x] = counts.get(x, 0) + 1
    return math.prod(math.factorial(m) for m in counts.values())


def orbit_size(lam: DominantWeight) -> int:
    return math.factorial(lam.N) // stabilizer_order(lam.parts)


@lru_cache(maxsize=4096)
def _distinct_permutations(vec: tuple) -> tuple[tuple, ...]:
    return tuple(sorted(set(itertools.permutations(vec)), reverse=True))


def weyl_orbit(lam: DominantWeight) -> frozenset[tuple[Fraction, ...]]:
    """The S_N-orbit of λ as a set of traceless coordinate tuples."""
    return frozenset(_distinct_permutations(lam.coords))


def partition_orbit(parts: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Distinct rearrangements of an integer vector (the monomial exponents of m_λ)."""
    return _distinct_permutations(tuple(parts))


def highest_root(N: int) -> DominantWeight:
    """θ = ε₁ - ε_N."""
    if N < 2:
        raise ValueError("the highest root needs N >= 2")
    return DominantWeight((2,) + (1,) * (N - 2) + (0,))


def fundamental_weight(i: int, N: int) -> DominantWeight:
    """Λ_i, i = 1..N-1 (partition 1^i)."""
    if not 1 <= i <= N - 1:
        raise ValueError(f"fundamental weight index {i} out of range for N={N}")
    return DominantWeight((1,) * i + (0,) * (N - i))


def partitions(n: int, N: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """All partitions of n with at most N parts, padded to length N, lex-decreasing."""
    if max_part is None:
        max_part = n
    if N == 0:
        if n == 0:
            yield ()
        return
    if n == 0:
        yield (0,) * N
        return
    for first in range(min(n, max_part), 0, -1):
        if first * N < n:
            break
        for rest in partitions(n - first, N - 1, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def dominated_partitions(top: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Partitions of |top| with len(top) parts that are ⪯ top, lex-decreasing."""
    n, N = sum(top), len(top)
    return tuple(p for p in partitions(n, N, top[0]) if _prefix_leq(p, top))


def basis_sort_key(lam: DominantWeight) -> tuple:
    """Global basis order: by |λ|⋆, then reverse-lexicographic on parts."""
    return (lam.size, tuple(-x for x in lam.parts))


def sorted_weights(weights: Iterable[DominantWeight]) -> list[DominantWeight]:
    return sorted(weights, key=basis_sort_key)


def fundamental_gram(N: int) -> list[list[Fraction]]:
    """(Λ_i|Λ_j) = min(i, j) - ij/N."""
    return [
        [Fraction(min(i, j)) - Fraction(i * j, N) for j in range(1, N)]
        for i in range(1, N)
    ]


def pairing_denominator(N: int) -> int:
    """Least n > 0 with (P|P) ⊂ Z/n, read off the fundamental-weight Gram matrix."""
    n = 1
    for row in fundamental_gram(N):
        for x in row:
            n = math.lcm(n, x.denominator)
    return n
