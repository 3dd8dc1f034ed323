"""A_{N-1}-Jacobi (mean-shifted Jack) polynomials as exact eigenfunctions.

The gauge-transformed trigonometric operator is realised as

    H₀ = Σ_i (z_i∂_i - |λ|⋆/N)² + β Σ_{i<j} (z_i+z_j)/(z_i-z_j) (z_i∂_i - z_j∂_j) + (ρ|ρ) - e₀

on the monomial basis, so that H₀ J_λ = E_λ J_λ with E_λ = (λ+ρ|λ+ρ) - e₀.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .lattice import (
    CouplingData,
    DominantWeight,
    _trig_eigenvalue,
    dominated_partitions,
    lift_partition,
    partition_orbit,
    partitions,
    rho_and_e0,
    trig_eigenvalue,
)
from .sympoly import SymPoly

__all__ = [
    "JackPolynomial",
    "JackExpansion",
    "ConsistencyError",
    "h0_apply",
    "jack",
    "jack_expand",
    "jack_partition_coeffs",
    "norm_sq_ratio",
    "j_factor",
    "cauchy_check",
    "CauchyReport",
    "cauchy_lhs",
    "evaluation_bound",
    "evaluation_constant",
]


class ConsistencyError(RuntimeError):
    """An exact identity that must hold by construction failed."""


@dataclass(frozen=True)
class JackPolynomial:
    label: DominantWeight
    beta: Fraction
    expansion: SymPoly
    eigenvalue: Fraction


@dataclass(frozen=True)
class JackExpansion:
    """Coordinates Σ c_λ J_λ of a polynomial in the Jack basis."""

    coeffs: Mapping[DominantWeight, Fraction]
    beta: Fraction
    N: int = field(default=0)

    def coeff(self, lam: DominantWeight) -> Fraction:
        return self.coeffs.get(lam, Fraction(0))


# --------------------------------------------------------------------------
# the operator


@lru_cache(maxsize=None)
def _h0_mono(parts: tuple[int, ...], beta: Fraction) -> tuple[tuple[tuple[int, ...], Fraction], ...]:
    """H₀ m_λ for a canonical partition, as sorted (canonical key, coeff) pairs."""
    N = len(parts)
    shift = Fraction(sum(parts), N)
    rho, e0 = rho_and_e0(CouplingData(N, beta))
    const = sum((r * r for r in rho), Fraction(0)) - e0
    diag = sum(((x - shift) ** 2 for x in parts), Fraction(0)) + const

    acc: dict[tuple[int, ...], Fraction] = {parts: diag}
    cross: dict[tuple[int, ...], int] = {}
    for a in partition_orbit(parts):
        for i, j in itertools.combinations(range(N), 2):
            p, q = a[i], a[j]
            if p <= q:
                continue
            # (z_i+z_j)/(z_i-z_j)·(z_i^p z_j^q - z_i^q z_j^p)
            #   = z_i^p z_j^q + z_i^q z_j^p + 2 Σ_{r=1}^{p-q-1} z_i^{p-r} z_j^{q+r}
            w = p - q
            for r in range(0, p - q + 1):
                mult = 1 if r in (0, p - q) else 2
                b = list(a)
                b[i], b[j] = p - r, q + r
                if all(b[t] >= b[t + 1] for t in range(N - 1)):
                    key = tuple(x - b[-1] for x in b)
                    cross[key] = cross.get(key, 0) + mult * w
    for key, v in cross.items():
        acc[key] = acc.get(key, Fraction(0)) + beta * v
    return tuple(sorted(((k, c) for k, c in acc.items() if c), reverse=True))


def h0_apply(f: SymPoly, c: CouplingData) -> SymPoly:
    """Image of f under the gauge-transformed trigonometric Hamiltonian."""
    if f.N != c.N:
        raise ValueError(f"rank mismatch: polynomial N={f.N}, coupling N={c.N}")
    acc: dict[tuple[int, ...], Fraction] = {}
    for lam, coef in f.items():
        for key, h in _h0_mono(lam.parts, c.beta):
            acc[key] = acc.get(key, Fraction(0)) + coef * h
    return SymPoly(c.N, {DominantWeight(k): v for k, v in acc.items() if v})


# --------------------------------------------------------------------------
# construction


_CACHE: dict[tuple[Fraction, tuple[int, ...]], JackPolynomial] = {}
_LOCK = threading.RLock()


def _solve(parts: tuple[int, ...], beta: Fraction) -> dict[tuple[int, ...], Fraction]:
    """Triangular solve for the m-coefficients of J, keyed by partitions of |parts|."""
    n = sum(parts)
    below = dominated_partitions(parts)  # lex-decreasing, starts with parts itself
    e_top = _trig_eigenvalue(parts, beta)
    u: dict[tuple[int, ...], Fraction] = {parts: Fraction(1)}
    # column contributions h_{κν}: accumulate Σ_κ h_{κν} u_κ as κ is finalised
    pending: dict[tuple[int, ...], Fraction] = {}

    def push(kappa: tuple[int, ...]) -> None:
        canon = tuple(x - kappa[-1] for x in kappa)
        for key, h in _h0_mono(canon, beta):
            nu = lift_partition(key, n)
            if nu == kappa:
                continue
            pending[nu] = pending.get(nu, Fraction(0)) + h * u[kappa]

    push(parts)
    for nu in below[1:]:
        rhs = pending.pop(nu, Fraction(0))
        if not rhs:
            continue
        denom = e_top - _trig_eigenvalue(tuple(x - nu[-1] for x in nu), beta)
        if denom == 0:
            raise ConsistencyError(f"E_λ = E_ν for ν={nu} ≺ λ={parts} at beta={beta}")
        u[nu] = rhs / denom
        push(nu)
    if pending and any(pending.values()):
        stray = [k for k, v in pending.items() if v]
        raise ConsistencyError(f"H₀ m_κ left the dominance ideal of {parts}: {stray[:3]}")
    return u


def jack(lam: DominantWeight, c: CouplingData) -> JackPolynomial:
    """J_λ = m_λ + Σ_{ν≺λ} u_{λν} m_ν with H₀ J_λ = E_λ J_λ (cached per β)."""
    if lam.N != c.N:
        raise ValueError(f"rank mismatch: weight N={lam.N}, coupling N={c.N}")
    key = (c.beta, lam.parts)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    with _LOCK:
        hit = _CACHE.get(key)
        if hit is not None:
            return hit
        u = _solve(lam.parts, c.beta)
        poly = SymPoly(c.N, {DominantWeight(nu): v for nu, v in u.items()})
        out = JackPolynomial(lam, c.beta, poly, trig_eigenvalue(lam, c))
        _CACHE[key] = out
        return out


def jack_partition_coeffs(parts: tuple[int, ...], c: CouplingData) -> dict[tuple[int, ...], Fraction]:
    """m-coefficients of the N-variable Jack polynomial J*_λ for any λ ∈ M_N.

    Keys are partitions of |λ|⋆ (not canonicalised), which is the form the
    Cauchy identity needs.  Uses J*_{λ+1^N} = (z₁⋯z_N) J*_λ.
    """
    n = sum(parts)
    J = jack(DominantWeight(parts), c)
    return {lift_partition(nu.parts, n): v for nu, v in J.expansion.items()}


def jack_expand(f: SymPoly, c: CouplingData) -> JackExpansion:
    """Rewrite f in the Jack basis by peeling off dominance-maximal terms."""
    if f.N != c.N:
        raise ValueError(f"rank mismatch: polynomial N={f.N}, coupling N={c.N}")
    rest: dict[DominantWeight, Fraction] = dict(f.items())
    out: dict[DominantWeight, Fraction] = {}
    while rest:
        # largest size first, then lex-largest: this term is dominance-maximal
        top = max(rest, key=lambda lam: (lam.size, lam.parts))
        coef = rest[top]
        out[top] = coef
        for nu, u in jack(top, c).expansion.items():
            v = rest.get(nu, Fraction(0)) - coef * u
            if v:
                rest[nu] = v
            else:
                rest.pop(nu, None)
    return JackExpansion(out, c.beta, c.N)


# --------------------------------------------------------------------------
# norms and normalisation factors


def _gamma_ratio(x: Fraction, y: Fraction) -> Fraction:
    """Γ(x)/Γ(y) for x - y ∈ Z and x, y > 0."""
    d = x - y
    if d.denominator != 1:
        raise ConsistencyError(f"non-integral Γ shift {x} - {y}")
    d = int(d)
    out = Fraction(1)
    if d >= 0:
        for t in range(d):
            out *= y + t
    else:
        for t in range(-d):
            out /= x + t
    return out


def norm_sq_ratio(lam: DominantWeight, mu: DominantWeight, c: CouplingData) -> Fraction:
    """‖J_λ‖² / ‖J_μ‖² from the Γ-product norm formula, evaluated exactly."""
    if c.beta <= 0:
        raise ValueError("norm_sq_ratio requires beta > 0")
    if lam.N != c.N or mu.N != c.N:
        raise ValueError("rank mismatch in norm_sq_ratio")
    return _norm_sq_ratio(lam.parts, mu.parts, c.beta)


@lru_cache(maxsize=None)
def _norm_sq_ratio(lp: tuple[int, ...], mp: tuple[int, ...], beta: Fraction) -> Fraction:
    N = len(lp)
    out = Fraction(1)
    for i in range(N):
        for j in range(i + 1, N):
            base = beta * (j - i)
            x = lp[i] - lp[j] + base
            y = mp[i] - mp[j] + base
            out *= _gamma_ratio(x + beta, y + beta)
            out *= _gamma_ratio(x - beta + 1, y - beta + 1)
            out /= _gamma_ratio(x, y)
            out /= _gamma_ratio(x + 1, y + 1)
    return out


def conjugate(parts) -> tuple[int, ...]:
    parts = [x for x in parts if x > 0]
    if not parts:
        return ()
    return tuple(sum(1 for x in parts if x > j) for j in range(parts[0]))


def j_factor(parts, c: CouplingData) -> Fraction:
    """j_λ = Π_s (a(s) + βl(s) + 1) / (a(s) + βl(s) + β) over the cells of λ."""
    beta = c.beta
    rows = [x for x in parts if x > 0]
    cols = conjugate(rows)
    out = Fraction(1)
    for i, row in enumerate(rows):
        for j in range(row):
            arm = row - j - 1
            leg = cols[j] - i - 1
            out *= (arm + beta * leg + 1) / (arm + beta * leg + beta)
    return out


# --------------------------------------------------------------------------
# Cauchy identity


@dataclass
class CauchyReport:
    ok: bool
    degree_cap: int
    N: int
    beta: Fraction
    checked: int = 0
    mismatch: dict | None = None


def _rising(beta: Fraction, r: int) -> Fraction:
    """Coefficient of t^r in (1 - t)^{-β}: (β)_r / r!."""
    out = Fraction(1)
    for t in range(r):
        out *= beta + t
    return out / math.factorial(r)


def _tables(rows: tuple[int, ...], cols: tuple[int, ...]):
    """Nonnegative integer matrices with the given row and column sums."""
    if not rows:
        if all(x == 0 for x in cols):
            yield ()
        return
    first, rest = rows[0], rows[1:]

    def fill(k: int, remaining: int, caps: tuple[int, ...]):
        if k == len(caps) - 1:
            if remaining <= caps[k]:
                yield (remaining,)
            return
        for v in range(min(remaining, caps[k]), -1, -1):
            for tail in fill(k + 1, remaining - v, caps):
                yield (v,) + tail

    for row in fill(0, first, cols):
        left = tuple(c - v for c, v in zip(cols, row))
        for tail in _tables(rest, left):
            yield (row,) + tail


def cauchy_lhs(a: tuple[int, ...], b: tuple[int, ...], beta: Fraction) -> Fraction:
    """Coefficient of X^a Y^b in Π_{i,j} (1 - X_i Y_j)^{-β}."""
    total = Fraction(0)
    for table in _tables(a, b):
        term = Fraction(1)
        for row in table:
            for r in row:
                if r:
                    term *= _rising(beta, r)
        total += term
    return total


def cauchy_check(c: CouplingData, degree_cap: int) -> CauchyReport:
    """Compare both sides of the Cauchy identity degree by degree in the m⊗m basis."""
    report = CauchyReport(ok=True, degree_cap=degree_cap, N=c.N, beta=c.beta)
    for d in range(degree_cap + 1):
        parts = list(partitions(d, c.N))
        rhs: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction] = {}
        for lam in parts:
            u = jack_partition_coeffs(lam, c)
            jinv = 1 / j_factor(lam, c)
            for a, ua in u.items():
                for b, ub in u.items():
                    rhs[(a, b)] = rhs.get((a, b), Fraction(0)) + ua * ub * jinv
        for a in parts:
            for b in parts:
                lhs = cauchy_lhs(a, b, c.beta)
                r = rhs.get((a, b), Fraction(0))
                report.checked += 1
                if lhs != r:
                    report.ok = False
                    report.mismatch = {"degree": d, "X": a, "Y": b, "lhs": lhs, "rhs": r}
                    return report
    return report


# --------------------------------------------------------------------------
# evaluation bound


def cauchy_diagonal_coeff(n: int, c: CouplingData) -> Fraction:
    """c_n = coefficient of κⁿ in (1 - κ)^{-βN²}, the Cauchy kernel at X = Y = 1."""
    return _rising(c.beta * c.N * c.N, n)


def evaluation_constant(c: CouplingData, C0: int = 2) -> float:
    """A with c_n ≤ A² C0^{2n} for every n ≥ 0 (the ratio peaks at finite n)."""
    base = Fraction(C0 * C0)
    a2 = Fraction(0)
    n = 0
    while True:
        r = cauchy_diagonal_coeff(n, c) / base**n
        a2 = max(a2, r)
        # c_{n+1}/c_n = (βN² + n)/(n + 1) drops below C0² for good once n is past this point
        if (c.beta * c.N * c.N + n) / (n + 1) < base:
            break
        n += 1
    return math.sqrt(a2)


def evaluation_bound(lam: DominantWeight, c: CouplingData, C0: int = 2) -> tuple[Fraction, float]:
    """(J_λ(1), A·C0^{(N-1)√(2(λ|λ))}); the first never exceeds the second for β ≥ 1."""
    from .lattice import weight_inner
    from .sympoly import eval_at_one

    val = eval_at_one(jack(lam, c).expansion)
    radius = (c.N - 1) * math.sqrt(2 * float(weight_inner(lam, lam)))
    return val, evaluation_constant(c, C0) * C0**radius
