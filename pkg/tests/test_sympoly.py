"""Symmetric polynomials in the monomial basis, checked against point evaluation."""

from __future__ import annotations

import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmspert.lattice import DominantWeight
from cmspert.sympoly import SymPoly, eval_angles, eval_at_one, eval_numeric, mono_mul, poly_mul


def polys(N: int):
    key = st.lists(st.integers(0, 3), min_size=N, max_size=N).map(lambda xs: DominantWeight(tuple(sorted(xs, reverse=True))))
    coeff = st.fractions(min_value=-5, max_value=5, max_denominator=7)
    return st.dictionaries(key, coeff, max_size=4).map(lambda d: SymPoly(N, d))


def torus_point(N: int, rng: random.Random):
    x = [rng.uniform(0, 2 * math.pi) for _ in range(N)]
    return [xi - sum(x) / N for xi in x]


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 3).flatmap(lambda N: st.tuples(polys(N), polys(N))), st.randoms(use_true_random=False))
def test_product_matches_pointwise(pair, rng):
    f, g = pair
    x = torus_point(f.N, rng)
    assert abs(eval_angles(poly_mul(f, g), x) - eval_angles(f, x) * eval_angles(g, x)) <= 1e-9 * (1 + abs(eval_angles(f, x) * eval_angles(g, x)))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 3).flatmap(lambda N: st.tuples(polys(N), polys(N), polys(N))))
def test_ring_axioms(triple):
    f, g, h = triple
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == SymPoly(f.N)


def test_eval_at_one_is_multiplicative():
    a, b = DominantWeight((2, 1, 0)), DominantWeight((1, 0, 0))
    assert eval_at_one(mono_mul(a, b)) == 6 * 3


def test_eval_numeric_agrees_with_angles():
    f = SymPoly(3, {DominantWeight((2, 1, 0)): Fraction(3, 2), DominantWeight((1, 0, 0)): -1})
    x = torus_point(3, random.Random(5))
    z = [cmath.exp(1j * t) for t in x]
    assert abs(eval_numeric(f, z) - eval_angles(f, x)) <= 1e-12


def test_json_round_trip():
    f = SymPoly(3, {DominantWeight((2, 1, 0)): Fraction(3, 2), DominantWeight((0, 0, 0)): -1})
    assert SymPoly.from_json(f.to_json()) == f


def test_rank_mismatch():
    with pytest.raises(ValueError):
        SymPoly.one(2) + SymPoly.one(3)
    with pytest.raises(ValueError):
        eval_angles(SymPoly.one(2), [0.0, 0.0, 0.0])
