"""Weights, dominance and the unperturbed spectrum."""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmspert.lattice import (
    CouplingData,
    DominantWeight,
    dominance_leq,
    fundamental_gram,
    fundamental_weight,
    highest_root,
    lift_partition,
    orbit_size,
    pairing_denominator,
    parse_rational,
    partitions,
    rho_and_e0,
    same_coset,
    sorted_weights,
    trig_eigenvalue,
    weight_inner,
    weyl_orbit,
)


def weights(N: int, max_part: int = 5):
    parts = st.lists(st.integers(0, max_part), min_size=N, max_size=N)
    return parts.map(lambda xs: DominantWeight(tuple(sorted(xs, reverse=True))))


def simple_root_decomposition(a: DominantWeight, b: DominantWeight):
    """Coefficients of b - a in the simple roots, by solving the triangular system."""
    diff = [y - x for x, y in zip(a.coords, b.coords)]
    out, acc = [], Fraction(0)
    for d in diff[:-1]:
        acc += d
        out.append(acc)
    return out


def test_canonical_form_and_coords():
    a = DominantWeight((3, 1, 1))
    assert a == DominantWeight((2, 0, 0))
    assert a.parts == (2, 0, 0)
    assert sum(a.coords) == 0
    assert DominantWeight.from_coords(a.coords) == a


def test_invalid_weights():
    with pytest.raises(ValueError):
        DominantWeight((1, 2))
    with pytest.raises(ValueError):
        DominantWeight.from_coords([Fraction(1, 2), Fraction(-1, 2), 0])
    with pytest.raises(ValueError):
        CouplingData(1, 2)
    with pytest.raises(ValueError):
        CouplingData(2, 0)


def test_parse_rational():
    assert parse_rational("3/2") == Fraction(3, 2)
    assert parse_rational("2") == 2
    assert parse_rational("0.25") == Fraction(1, 4)
    with pytest.raises(ValueError):
        parse_rational("x")


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 4).flatmap(lambda N: st.tuples(weights(N), weights(N))))
def test_dominance_matches_root_coordinates(pair):
    a, b = pair
    coeffs = simple_root_decomposition(a, b)
    brute = all(c.denominator == 1 and c >= 0 for c in coeffs)
    assert dominance_leq(a, b) == brute
    assert same_coset(a, b) == all(c.denominator == 1 for c in coeffs)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4).flatmap(lambda N: st.tuples(weights(N), weights(N), weights(N))))
def test_dominance_is_partial_order(triple):
    a, b, c = triple
    assert dominance_leq(a, a)
    if dominance_leq(a, b) and dominance_leq(b, a):
        assert a == b
    if dominance_leq(a, b) and dominance_leq(b, c):
        assert dominance_leq(a, c)


def test_lift_partition():
    assert lift_partition((1, 0), 3) == (2, 1)
    with pytest.raises(ValueError):
        lift_partition((1, 0), 2)


def test_partitions_enumeration():
    got = list(partitions(4, 3))
    assert got == sorted(got, reverse=True)
    assert set(got) == {p for p in itertools.product(range(5), repeat=3) if sum(p) == 4 and list(p) == sorted(p, reverse=True)}


def test_orbit_sizes():
    for lam in (DominantWeight((2, 1, 0)), DominantWeight((2, 0, 0)), DominantWeight((0, 0, 0))):
        assert orbit_size(lam) == len(weyl_orbit(lam))
    assert orbit_size(DominantWeight((2, 1, 0))) == 6


def test_eigenvalue_is_shifted_norm():
    c = CouplingData(3, Fraction(5, 2))
    rho, e0 = rho_and_e0(c)
    for lam in (DominantWeight((0, 0, 0)), DominantWeight((3, 1, 0))):
        v = [x + r for x, r in zip(lam.coords, rho)]
        assert trig_eigenvalue(lam, c) == sum(x * x for x in v) - e0


def test_highest_root_and_gram():
    N = 4
    theta = highest_root(N)
    assert weight_inner(theta, theta) == 2
    gram = fundamental_gram(N)
    for i in range(1, N):
        for j in range(1, N):
            assert weight_inner(fundamental_weight(i, N), fundamental_weight(j, N)) == gram[i - 1][j - 1]
    assert pairing_denominator(2) == 2
    assert pairing_denominator(3) == 3
    assert pairing_denominator(4) == 4


def test_sorted_weights_graded():
    ws = [DominantWeight(p) for p in ((1, 1, 0), (2, 0, 0), (0, 0, 0), (1, 0, 0))]
    out = sorted_weights(ws)
    assert [w.size for w in out] == sorted(w.size for w in out)
    assert out[-2:] == [DominantWeight((2, 0, 0)), DominantWeight((1, 1, 0))]
