"""Exact sparse arithmetic in the monomial basis {m_λ} of C[P]^W.

m_λ is the orbit sum Σ_{μ ∈ Wλ} e^μ.  Keys are :class:`DominantWeight`
objects (traceless weights stored by canonical partition), coefficients are
Fractions.  Zero coefficients are never stored.
"""

from __future__ import annotations

import cmath
import json
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .lattice import (
    DominantWeight,
    basis_sort_key,
    orbit_size,
    partition_orbit,
    stabilizer_order,
)

__all__ = [
    "SymPoly",
    "mono_mul",
    "poly_mul",
    "poly_add",
    "poly_scale",
    "poly_sum",
    "eval_at_one",
    "eval_numeric",
    "eval_angles",
]


class SymPoly:
    """Σ c_λ m_λ with exact rational coefficients."""

    __slots__ = ("N", "_terms")

    def __init__(self, N: int, terms: Mapping[DominantWeight, Fraction | int] | None = None):
        self.N = int(N)
        clean: dict[DominantWeight, Fraction] = {}
        for lam, c in (terms or {}).items():
            if lam.N != self.N:
                raise ValueError(f"key {lam} has N={lam.N}, polynomial has N={self.N}")
            c = Fraction(c)
            if c:
                clean[lam] = clean.get(lam, Fraction(0)) + c
                if not clean[lam]:
                    del clean[lam]
        self._terms = clean

    @classmethod
    def monomial(cls, lam: DominantWeight, coeff: Fraction | int = 1) -> "SymPoly":
        return cls(lam.N, {lam: coeff})

    @classmethod
    def one(cls, N: int) -> "SymPoly":
        return cls.monomial(DominantWeight.zero(N))

    @property
    def terms(self) -> Mapping[DominantWeight, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, lam: DominantWeight) -> Fraction:
        return self._terms.get(lam, Fraction(0))

    def support(self) -> list[DominantWeight]:
        return sorted(self._terms, key=basis_sort_key)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymPoly):
            return NotImplemented
        return self.N == other.N and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.N, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*m[{lam}]" for lam, c in sorted(self._terms.items(), key=lambda t: basis_sort_key(t[0])))
        return f"SymPoly(N={self.N}: {body or '0'})"

    def _check(self, other: "SymPoly") -> None:
        if self.N != other.N:
            raise ValueError(f"rank mismatch: N={self.N} vs N={other.N}")

    def __add__(self, other: "SymPoly") -> "SymPoly":
        return poly_add(self, other)

    def __sub__(self, other: "SymPoly") -> "SymPoly":
        return poly_add(self, poly_scale(other, -1))

    def __neg__(self) -> "SymPoly":
        return poly_scale(self, -1)

    def __mul__(self, other: "SymPoly | Fraction | int") -> "SymPoly":
        if isinstance(other, SymPoly):
            return poly_mul(self, other)
        return poly_scale(self, other)

    __rmul__ = __mul__

    # --- serialization -------------------------------------------------
    def to_json_obj(self) -> list[dict]:
        out = []
        for lam in self.support():
            c = self._terms[lam]
            s = lam.shift
            out.append({
                "partition": list(lam.parts),
                "shift_num": s.numerator,
                "shift_den": s.denominator,
                "coeff_num": c.numerator,
                "coeff_den": c.denominator,
            })
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj: Sequence[Mapping], N: int | None = None) -> "SymPoly":
        terms: dict[DominantWeight, Fraction] = {}
        for row in obj:
            lam = DominantWeight(tuple(row["partition"]))
            if Fraction(row["shift_num"], row["shift_den"]) != lam.shift:
                raise ValueError(f"inconsistent shift for partition {row['partition']}")
            terms[lam] = Fraction(row["coeff_num"], row["coeff_den"])
        if N is None:
            if not terms:
                raise ValueError("cannot infer N from an empty polynomial")
            N = next(iter(terms)).N
        return cls(N, terms)

    @classmethod
    def from_json(cls, text: str, N: int | None = None) -> "SymPoly":
        return cls.from_json_obj(json.loads(text), N)


@lru_cache(maxsize=200_000)
def _mono_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], Fraction], ...]:
    # m_a m_b = Σ_{μ∈Wb} |W_{a+μ}| / |W_a| · m_{dom(a+μ)}, b has the smaller orbit
    if len(partition_orbit(a)) < len(partition_orbit(b)):
        a, b = b, a
    wa = stabilizer_order(a)
    acc: dict[tuple[int, ...], Fraction] = {}
    for mu in partition_orbit(b):
        v = tuple(x + y for x, y in zip(a, mu))
        key = tuple(sorted(v, reverse=True))
        key = tuple(x - key[-1] for x in key)
        acc[key] = acc.get(key, Fraction(0)) + Fraction(stabilizer_order(v), wa)
    return tuple(sorted(acc.items(), reverse=True))


def mono_mul(a: DominantWeight, b: DominantWeight) -> SymPoly:
    """m_a · m_b expanded in the m-basis."""
    if a.N != b.N:
        raise ValueError(f"rank mismatch: N={a.N} vs N={b.N}")
    return SymPoly(a.N, {DominantWeight(k): c for k, c in _mono_mul(a.parts, b.parts)})


def poly_add(f: SymPoly, g: SymPoly) -> SymPoly:
    f._check(g)
    out = dict(f._terms)
    for lam, c in g._terms.items():
        out[lam] = out.get(lam, Fraction(0)) + c
    return SymPoly(f.N, out)


def poly_scale(f: SymPoly, s: Fraction | int) -> SymPoly:
    s = Fraction(s)
    if not s:
        return SymPoly(f.N)
    return SymPoly(f.N, {lam: c * s for lam, c in f._terms.items()})


def poly_mul(f: SymPoly, g: SymPoly) -> SymPoly:
    f._check(g)
    acc: dict[tuple[int, ...], Fraction] = {}
    for la, ca in f._terms.items():
        for lb, cb in g._terms.items():
            w = ca * cb
            for key, m in _mono_mul(la.parts, lb.parts):
                acc[key] = acc.get(key, Fraction(0)) + w * m
    return SymPoly(f.N, {DominantWeight(k): c for k, c in acc.items() if c})


def poly_sum(polys: Iterable[SymPoly], N: int) -> SymPoly:
    acc: dict[DominantWeight, Fraction] = {}
    for f in polys:
        for lam, c in f._terms.items():
            acc[lam] = acc.get(lam, Fraction(0)) + c
    return SymPoly(N, acc)


def eval_at_one(f: SymPoly) -> Fraction:
    """f(1, ..., 1) = Σ c_λ |Wλ|."""
    return sum((c * orbit_size(lam) for lam, c in f._terms.items()), Fraction(0))


def eval_numeric(f: SymPoly, z: Sequence[complex]) -> complex:
    """Evaluate f at z ∈ (C^×)^N.

    Each e^λ is Π z_i^{λ_i} · (z_1⋯z_N)^{-|λ|⋆/N} with the principal branch of
    the fractional power; on the torus with Π z_i = 1 the result is
    branch-free.
    """
    z = [complex(x) for x in z]
    if len(z) != f.N:
        raise ValueError(f"expected {f.N} coordinates, got {len(z)}")
    if any(x == 0 for x in z):
        raise ValueError("eval_numeric: zero coordinate")
    log_prod = cmath.log(_prod(z))
    total = 0j
    for lam, c in f._terms.items():
        mean_factor = cmath.exp(-float(lam.shift) * log_prod)
        s = 0j
        for a in partition_orbit(lam.parts):
            s += _prod(zi ** ai for zi, ai in zip(z, a))
        total += float(c) * s * mean_factor
    return total


def eval_angles(f: SymPoly, x: Sequence[float]) -> complex:
    """Evaluate f at h with ε-coordinates x, i.e. e^μ(h) = exp(i Σ μ_j x_j)."""
    if len(x) != f.N:
        raise ValueError(f"expected {f.N} angles, got {len(x)}")
    total = 0j
    for lam, c in f._terms.items():
        s = lam.shift
        for a in partition_orbit(lam.parts):
            phase = sum(float(ai - s) * xi for ai, xi in zip(a, x))
            total += float(c) * cmath.exp(1j * phase)
    return total


def _prod(values) -> complex:
    out = 1 + 0j
    for v in values:
        out *= v
    return out
