"""Jack polynomials against independent numeric oracles."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from cmspert.jack import (
    cauchy_check,
    conjugate,
    evaluation_bound,
    h0_apply,
    j_factor,
    jack,
    jack_expand,
    norm_sq_ratio,
)
from cmspert.lattice import CouplingData, DominantWeight, dominance_leq, partitions, rho_and_e0
from cmspert.oracle import QuadratureGrid, quad_inner
from cmspert.sympoly import SymPoly, eval_angles


def dominant_weights(N: int, L: int):
    for n in range(L + 1):
        for p in partitions(n, N):
            if p[-1] == 0:
                yield DominantWeight(p)


def torus_point(N: int, rng: random.Random):
    x = [rng.uniform(0.3, 2 * math.pi - 0.3) for _ in range(N)]
    return np.array([xi - sum(x) / N for xi in x])


def sutherland_gauge(f: SymPoly, c: CouplingData, x: np.ndarray, h: float = 1e-3) -> complex:
    """Δ⁻¹ H (Δ f) at x, with H = -Σ∂² + Σ_{i<j} β(β-1)/(2 sin²((x_i-x_j)/2)), by central differences."""
    beta = float(c.beta)
    N = c.N

    def psi(y):
        d = 1.0
        for i in range(N):
            for j in range(i + 1, N):
                d *= abs(math.sin((y[i] - y[j]) / 2)) ** beta
        return d * eval_angles(f, y)

    lap = 0j
    for i in range(N):
        e = np.zeros(N)
        e[i] = h
        # fourth-order stencil
        lap += (-psi(x + 2 * e) + 16 * psi(x + e) - 30 * psi(x) + 16 * psi(x - e) - psi(x - 2 * e)) / (12 * h * h)
    pot = sum(beta * (beta - 1) / (2 * math.sin((x[i] - x[j]) / 2) ** 2) for i in range(N) for j in range(i + 1, N))
    p0 = psi(x)
    return (-lap + pot * p0) * eval_angles(f, x) / p0


@pytest.mark.parametrize("N,beta", [(2, Fraction(2)), (3, Fraction(3, 2)), (3, Fraction(2))])
def test_eigenvalue_against_differential_operator(N, beta):
    c = CouplingData(N, beta)
    _, e0 = rho_and_e0(c)
    rng = random.Random(11)
    for lam in list(dominant_weights(N, 3)):
        J = jack(lam, c).expansion
        x = torus_point(N, rng)
        got = sutherland_gauge(J, c, x)
        want = (float(jack(lam, c).eigenvalue + e0)) * eval_angles(J, x)
        assert abs(got - want) <= 1e-6 * max(1.0, abs(want)), (lam, got, want)


@pytest.mark.parametrize("N", [2, 3])
def test_h0_apply_matches_differential_operator(N):
    c = CouplingData(N, Fraction(5, 2))
    _, e0 = rho_and_e0(c)
    rng = random.Random(3)
    f = SymPoly(N, {DominantWeight((2,) + (0,) * (N - 1)): 1, DominantWeight((1,) + (0,) * (N - 1)): Fraction(-3, 4)})
    x = torus_point(N, rng)
    got = sutherland_gauge(f, c, x)
    want = eval_angles(h0_apply(f, c), x) + float(e0) * eval_angles(f, x)
    assert abs(got - want) <= 1e-6 * max(1.0, abs(want))


def test_beta_one_gives_schur_functions():
    """At β = 1 the Jack polynomial is the Schur function, given by the bialternant formula."""
    c = CouplingData(3, 1)
    rng = random.Random(7)
    for lam in dominant_weights(3, 5):
        x = torus_point(3, rng)
        z = np.exp(1j * x)
        num = np.linalg.det(np.array([[zi ** (lam.parts[j] + 2 - j) for j in range(3)] for zi in z]))
        den = np.linalg.det(np.array([[zi ** (2 - j) for j in range(3)] for zi in z]))
        schur = num / den * np.prod(z) ** (-float(lam.shift))
        assert abs(eval_angles(jack(lam, c).expansion, x) - schur) <= 1e-10


def test_triangular_and_monic():
    c = CouplingData(3, Fraction(2))
    for lam in dominant_weights(3, 5):
        J = jack(lam, c).expansion
        assert J.coeff(lam) == 1
        for mu in J.support():
            assert dominance_leq(mu, lam)


def test_small_examples():
    J = jack(DominantWeight((2, 0)), CouplingData(2, 2)).expansion
    assert J == SymPoly(2, {DominantWeight((2, 0)): 1, DominantWeight((1, 1)): Fraction(4, 3)})


def test_jack_expand_round_trip():
    c = CouplingData(3, Fraction(3, 2))
    f = SymPoly(3, {DominantWeight((3, 1, 0)): 2, DominantWeight((1, 0, 0)): Fraction(-1, 3), DominantWeight((0, 0, 0)): 5})
    exp = jack_expand(f, c)
    back = SymPoly(3)
    for lam, a in exp.coeffs.items():
        back = back + jack(lam, c).expansion * a
    assert back == f


@pytest.mark.parametrize("beta", [Fraction(1), Fraction(2), Fraction(3)])
def test_norm_ratio_against_quadrature_N3(beta):
    c = CouplingData(3, beta)
    grid = QuadratureGrid(3, beta, 48)
    zero = DominantWeight.zero(3)
    n0 = quad_inner(jack(zero, c).expansion, jack(zero, c).expansion, grid)
    for lam in dominant_weights(3, 3):
        J = jack(lam, c).expansion
        q = quad_inner(J, J, grid) / n0
        assert q == pytest.approx(float(norm_sq_ratio(lam, zero, c)), rel=1e-8)


def test_norm_ratio_half_integer_beta_converges():
    """|sin|^{2β} is not smooth for half-integer β, so the error only shrinks algebraically."""
    c = CouplingData(2, Fraction(3, 2))
    lam, zero = DominantWeight((2, 0)), DominantWeight.zero(2)
    exact = float(norm_sq_ratio(lam, zero, c))
    errs = []
    for n in (64, 256, 1024):
        g = QuadratureGrid(2, c.beta, n)
        J, one = jack(lam, c).expansion, jack(zero, c).expansion
        errs.append(abs(quad_inner(J, J, g) / quad_inner(one, one, g) - exact))
    assert errs[2] < errs[1] < errs[0]
    assert errs[2] <= 1e-8


def test_norm_ratio_beta_one_is_one():
    c = CouplingData(3, 1)
    for lam in dominant_weights(3, 4):
        assert norm_sq_ratio(lam, DominantWeight.zero(3), c) == 1


def test_conjugate_and_j_factor():
    assert conjugate((3, 1, 0)) == (2, 1, 1)
    # at β = 1 the arm/leg product reduces to the hook-length product squared ratio 1
    assert j_factor((2, 1, 0), CouplingData(3, 1)) == 1


def test_cauchy_identity_beta_three_halves():
    assert cauchy_check(CouplingData(2, Fraction(3, 2)), 4).ok


@pytest.mark.parametrize("N,beta", [(2, 2), (3, 2), (3, 1)])
def test_evaluation_bound(N, beta):
    c = CouplingData(N, Fraction(beta))
    for lam in dominant_weights(N, 6):
        val, bound = evaluation_bound(lam, c)
        assert 0 < val <= bound
