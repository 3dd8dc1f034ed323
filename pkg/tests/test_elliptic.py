"""Elliptic functions, the nome expansion of the potential and the p₀ bound."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from cmspert.elliptic import (
    Nome,
    PoleError,
    coupling_weight,
    divisors,
    p0_solve,
    p0_target,
    potential_order,
    t_k_value,
    theta1,
    theta_normalized,
    w_max,
    wp_lattice,
    wp_qseries,
    wp_qseries_eval,
    wp_regular,
)
from cmspert.lattice import CouplingData, DominantWeight, highest_root
from cmspert.sympoly import SymPoly


def d2(f, x, h=1e-3):
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h)


@pytest.mark.parametrize("p", [0.02, 0.1, 0.3])
def test_wp_satisfies_second_order_equation(p):
    """℘'' - 6℘² is the constant -g₂/2."""
    nome = Nome(p)
    f = lambda x: wp_qseries(x, nome).real
    vals = [d2(f, x) - 6 * f(x) ** 2 for x in (0.9, 1.7, 2.6, 3.1)]
    assert max(vals) - min(vals) <= 1e-5 * max(1.0, abs(vals[0]))


@pytest.mark.parametrize("p", [0.05, 0.2])
def test_wp_is_log_derivative_of_theta(p):
    """℘(x) + (log θ₁(x/2π))'' is independent of x."""
    nome = Nome(p)
    f = lambda x: math.log(theta1(x / (2 * math.pi), nome).real)
    vals = [wp_qseries(x, nome).real + d2(f, x) for x in (0.7, 1.5, 2.8)]
    assert max(vals) - min(vals) <= 1e-6


def test_wp_symmetries_and_periods():
    nome = Nome(0.07)
    x = 1.234
    assert wp_qseries(x, nome) == pytest.approx(wp_qseries(-x, nome), abs=1e-13)
    assert wp_qseries(x, nome) == pytest.approx(wp_qseries(x + 2 * math.pi, nome), abs=1e-11)
    z = complex(0.8, 0.3)
    assert wp_lattice(z, nome.tau) == pytest.approx(wp_lattice(z + 2 * math.pi * nome.tau, nome.tau), abs=1e-10)


def test_wp_tail_bound_is_honest():
    nome = Nome(0.3)
    coarse = wp_qseries_eval(1.1, nome, terms=10)
    fine = wp_qseries_eval(1.1, nome)
    assert abs(coarse.value - fine.value) <= coarse.tail_bound


def test_direct_lattice_sum_converges_slowly_to_rows():
    nome = Nome(0.05)
    rows = wp_lattice(1.0, nome.tau)
    direct = wp_lattice(1.0, nome.tau, cutoff=40, method="direct")
    assert abs(direct - rows) <= 1e-3


def test_pole():
    with pytest.raises(PoleError):
        wp_qseries(0.0, Nome(0.1))
    with pytest.raises(ValueError):
        Nome(1.0)


def test_theta_normalized():
    nome = Nome(0.1)
    h = 1e-6
    assert (theta_normalized(h, nome) / h).real == pytest.approx(1.0, abs=1e-9)
    assert theta1(0.3 + 1, nome) == pytest.approx(-theta1(0.3, nome), abs=1e-13)


def test_nome_tau_round_trip():
    nome = Nome(0.04)
    assert Nome.from_tau(nome.tau).p == pytest.approx(0.04, rel=1e-14)


def test_t_k_series_resums_to_wp():
    p = 0.05
    x = np.array([0.4, 1.3, 2.9])
    series = sum(p**k * np.array([t_k_value(k, xi) for xi in x]) for k in range(1, 40))
    assert np.allclose(series, wp_regular(x, Nome(p).tau), atol=1e-13)


def test_potential_order_small_example():
    c = CouplingData(2, 2)
    got = potential_order(1, c).poly
    theta = highest_root(2)
    assert got == SymPoly(2, {theta: -2, DominantWeight.zero(2): 4})
    assert potential_order(1, c).constant == 4


def test_divisors():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


def test_w_max_and_p0():
    c = CouplingData(3, 2)
    assert coupling_weight(c) == 12
    p0 = p0_solve(c)
    assert 0 < p0 < 1
    assert w_max(p0, c) == pytest.approx(p0_target(c), abs=1e-12)
    assert w_max(0.0, c) == 0.0
    # the Lambert series dominates its first term
    assert w_max(0.2, c) >= 4 * 0.2 / 0.8 * 12


def test_p0_without_potential():
    assert p0_solve(CouplingData(3, 1)) == 1.0


def test_p0_target_uses_denominator():
    assert p0_target(CouplingData(2, Fraction(3, 2))) == 1 / 16
