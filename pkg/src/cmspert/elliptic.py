"""Elliptic ingredients: ℘ and θ₁ evaluations, the nome expansion of the potential, W_max and p₀.

Periods are (2π, 2πτ) and the nome is p = exp(2πiτ).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .lattice import CouplingData, DominantWeight, highest_root, pairing_denominator
from .sympoly import SymPoly

__all__ = [
    "Nome",
    "PoleError",
    "PotentialOrder",
    "EllipticEval",
    "t_k_cos_series",
    "t_k_value",
    "potential_order",
    "potential_numeric",
    "wp_qseries",
    "wp_qseries_eval",
    "wp_lattice",
    "theta1",
    "theta_normalized",
    "w_max",
    "p0_solve",
    "p0_target",
    "coupling_weight",
    "theta1_prime0",
    "divisors",
    "wp_regular",
]


class PoleError(ValueError):
    """Evaluation point lies on the period lattice."""


@dataclass(frozen=True)
class Nome:
    """p = exp(2πiτ) with |p| < 1; real p is the case used throughout."""

    p: float

    def __post_init__(self) -> None:
        if not abs(self.p) < 1:
            raise ValueError(f"nome must satisfy |p| < 1, got {self.p}")

    @classmethod
    def from_tau(cls, tau: complex) -> "Nome":
        tau = complex(tau)
        if tau.imag <= 0:
            raise ValueError("Im tau must be positive")
        p = cmath.exp(2j * math.pi * tau)
        if abs(p.imag) > 1e-15 * max(1.0, abs(p)):
            raise ValueError("only real nomes are supported")
        return cls(p.real)

    @property
    def tau(self) -> complex:
        if self.p == 0:
            raise ValueError("p = 0 corresponds to tau = i∞")
        t = cmath.log(complex(self.p)) / (2j * math.pi)
        return complex(t.real, t.imag)


@dataclass(frozen=True)
class EllipticEval:
    value: complex
    tail_bound: float


@dataclass(frozen=True)
class PotentialOrder:
    """Order-k coefficient of the potential as an exact symmetric polynomial.

    ``poly`` already contains the constant term (as its m_0 coefficient);
    ``constant`` reports that coefficient for convenience.
    """

    k: int
    poly: SymPoly
    constant: Fraction


def divisors(k: int) -> list[int]:
    return [j for j in range(1, k + 1) if k % j == 0]


def t_k_cos_series(k: int) -> list[tuple[int, Fraction]]:
    """t_k(x) = Σ_{j|k} w_j (cos jx - 1) as pairs (j, w_j) with w_j = -2j."""
    if int(k) != k or k <= 0:
        raise ValueError(f"k must be a positive integer, got {k}")
    return [(j, Fraction(-2 * j)) for j in divisors(int(k))]


def t_k_value(k: int, x: float) -> float:
    return sum(float(w) * (math.cos(j * x) - 1.0) for j, w in t_k_cos_series(k))


def _multiple(lam: DominantWeight, j: int) -> DominantWeight:
    return DominantWeight(tuple(j * x for x in lam.parts))


def potential_order(k: int, c: CouplingData) -> PotentialOrder:
    """β(β-1) Σ_{α>0} t_k(⟨α,h⟩) = -β(β-1) Σ_{j|k} j (m_{jθ} - N(N-1))."""
    series = t_k_cos_series(k)
    g = c.beta * (c.beta - 1)
    N = c.N
    theta = highest_root(N)
    terms: dict[DominantWeight, Fraction] = {}
    zero = DominantWeight.zero(N)
    for j, _ in series:
        key = _multiple(theta, j)
        terms[key] = terms.get(key, Fraction(0)) - g * j
        terms[zero] = terms.get(zero, Fraction(0)) + g * j * N * (N - 1)
    poly = SymPoly(N, terms)
    return PotentialOrder(int(k), poly, poly.coeff(zero))


def potential_numeric(k: int, c: CouplingData, x) -> float:
    """Direct sum β(β-1) Σ_{i<j} t_k(x_i - x_j) in ε-coordinates x."""
    g = float(c.beta * (c.beta - 1))
    total = 0.0
    for i in range(c.N):
        for j in range(i + 1, c.N):
            total += t_k_value(k, x[i] - x[j])
    return g * total


# --------------------------------------------------------------------------
# Weierstrass ℘


def _check_pole(s: complex, what: str) -> None:
    if abs(s) < 1e-300:
        raise PoleError(f"{what} lies on the period lattice")


def _qseries_terms(p: float, eps: float = 1e-18) -> int:
    ap = abs(p)
    if ap == 0:
        return 1
    n = 1
    while n * ap**n / (1 - ap) > eps and n < 100_000:
        n += 1
    return n


def _qseries_tail(p: float, terms: int) -> float:
    """8 Σ_{n>terms} n|p|ⁿ/(1-|p|), summed to negligible remainder."""
    ap = abs(p)
    if ap == 0:
        return 0.0
    total, n = 0.0, terms + 1
    while True:
        t = n * ap**n
        total += t
        if t < 1e-20 * max(total, 1e-300) or t == 0.0:
            break
        n += 1
    # remaining terms are dominated by a geometric series with ratio (n+1)/n·|p|
    r = (n + 1) / n * ap
    total += n * ap**n * r / (1 - r) if r < 1 else float("inf")
    return 8 * total / (1 - ap)


def wp_qseries_eval(x: complex, nome: Nome, terms: int | None = None) -> EllipticEval:
    """℘(x) = 1/(4sin²(x/2)) - 1/12 - 2 Σ n pⁿ/(1-pⁿ) (cos nx - 1), with a tail bound for real x."""
    if terms is None:
        terms = _qseries_terms(nome.p)
    if terms < 1:
        raise ValueError("terms must be >= 1")
    x = complex(x)
    s = cmath.sin(x / 2)
    _check_pole(s, f"x={x}")
    val = 1 / (4 * s * s) - 1 / 12
    p = nome.p
    pn = 1.0
    acc = 0j
    for n in range(1, terms + 1):
        pn *= p
        if pn == 0:
            break
        acc += n * pn / (1 - pn) * (cmath.cos(n * x) - 1)
    val -= 2 * acc
    return EllipticEval(val, _qseries_tail(p, terms))


def wp_qseries(x: complex, nome: Nome, terms: int | None = None) -> complex:
    return wp_qseries_eval(x, nome, terms).value


def wp_lattice(x: complex, tau: complex, cutoff: int = 60, method: str = "rows") -> complex:
    """℘ from its lattice definition with periods 2π and 2πτ.

    ``method="rows"`` sums each row m ∈ Z in closed form
    (Σ_m (z + 2πm)^{-2} = 1/(4sin²(z/2))) and truncates |n| ≤ cutoff over the
    τ-direction; ``method="direct"`` truncates the double sum |m|, |n| ≤ cutoff
    literally (slow convergence, kept for reference).
    """
    x, tau = complex(x), complex(tau)
    if tau.imag <= 0:
        raise ValueError("Im tau must be positive")
    if method == "direct":
        _check_pole(x, "x")
        val = 1 / (x * x)
        for m in range(-cutoff, cutoff + 1):
            for n in range(-cutoff, cutoff + 1):
                if m == 0 and n == 0:
                    continue
                w = 2 * math.pi * m + 2 * math.pi * n * tau
                d = x - w
                _check_pole(d, f"x={x}")
                val += 1 / (d * d) - 1 / (w * w)
        return val
    if method != "rows":
        raise ValueError(f"unknown method {method!r}")
    val = -1 / 12 + 0j
    for n in range(-cutoff, cutoff + 1):
        s = cmath.sin((x - 2 * math.pi * n * tau) / 2)
        _check_pole(s, f"x={x}")
        val += 1 / (4 * s * s)
        if n:
            s0 = cmath.sin(math.pi * n * tau)
            val -= 1 / (4 * s0 * s0)
    return val


# --------------------------------------------------------------------------
# θ₁


def theta1(x: complex, nome: Nome, terms: int = 30) -> complex:
    """θ₁(x) = 2 Σ_{n≥1} (-1)^{n-1} p^{(n-1/2)²/2} sin((2n-1)πx)."""
    p = nome.p
    if p < 0:
        raise ValueError("theta1 needs a nonnegative real nome")
    total = 0j
    for n in range(1, terms + 1):
        total += (-1) ** (n - 1) * p ** ((n - 0.5) ** 2 / 2) * cmath.sin((2 * n - 1) * math.pi * complex(x))
    return 2 * total


def theta1_prime0(nome: Nome, terms: int = 30) -> float:
    p = nome.p
    return 2 * math.pi * sum((-1) ** (n - 1) * p ** ((n - 0.5) ** 2 / 2) * (2 * n - 1) for n in range(1, terms + 1))


def theta_normalized(x: complex, nome: Nome, terms: int = 30) -> complex:
    """θ(x) = θ₁(x)/θ₁'(0)."""
    return theta1(x, nome, terms) / theta1_prime0(nome, terms)


# --------------------------------------------------------------------------
# bounds


def _lambert_abs(ap: float) -> float:
    """Σ n aⁿ/(1-aⁿ) for 0 ≤ a < 1 with relative truncation error below 1e-16."""
    if ap == 0:
        return 0.0
    total, n, an = 0.0, 1, ap
    while True:
        t = n * an / (1 - an)
        total += t
        # later terms shrink at least geometrically with ratio (n+1)/n · a
        r = (n + 1) / n * ap
        if r < 1 and t * r / (1 - r) < 1e-17 * total:
            break
        n += 1
        an *= ap
    return total


def coupling_weight(c: CouplingData) -> Fraction:
    """Σ_{α} |k_α(k_α-1)| |α|² = N(N-1)|β(β-1)| for A_{N-1}."""
    return abs(c.N * (c.N - 1) * c.beta * (c.beta - 1))


def w_max(nome: Nome | float, c: CouplingData) -> float:
    """W_max(p) = 4 Σ n|p|ⁿ/(1-|p|ⁿ) · N(N-1)|β(β-1)|."""
    p = nome.p if isinstance(nome, Nome) else float(nome)
    if not abs(p) < 1:
        raise ValueError(f"|p| must be < 1, got {p}")
    return 4.0 * _lambert_abs(abs(p)) * float(coupling_weight(c))


def p0_target(c: CouplingData) -> float:
    return 1.0 / (4 * pairing_denominator(c.N) * c.k_den)


def p0_solve(c: CouplingData) -> float:
    """Root of W_max(p₀) = 1/(4 n k_den) on (0, 1); 1.0 when the potential vanishes."""
    if coupling_weight(c) == 0:
        return 1.0
    target = p0_target(c)
    hi = 0.5
    while w_max(hi, c) < target:
        hi = 1 - (1 - hi) / 2
    return brentq(lambda p: w_max(p, c) - target, 0.0, hi, xtol=1e-17, rtol=1e-15, maxiter=500)


def wp_regular(x, tau: complex, cutoff: int = 40):
    """℘(x) - 1/(4sin²(x/2)) + 1/12 from the lattice rows n ≠ 0 (vectorized, real x).

    Regular on the real axis, so it can be sampled on grids that contain x = 0.
    """
    x = np.asarray(x, dtype=float)
    tau = complex(tau)
    out = np.zeros(x.shape, dtype=complex)
    for n in range(1, cutoff + 1):
        w = 2 * math.pi * n * tau
        s0 = cmath.sin(w / 2)
        base = 1 / (4 * s0 * s0)
        for sgn in (1, -1):
            s = np.sin((x - sgn * w) / 2)
            out += 1 / (4 * s * s) - base
    return out.real
