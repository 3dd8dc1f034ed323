"""Order-k coupling matrices and the truncated operator."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from cmspert.assembly import BasisWindow, RootRational, t_matrix, weight_distance_sq, wk_column, wk_matrix
from cmspert.jack import ConsistencyError
from cmspert.lattice import CouplingData, DominantWeight
from cmspert.oracle import AsymmetryError, QuadratureGrid, diag_truncated, quadrature_operator


def test_root_rational():
    a = RootRational(Fraction(2), Fraction(3))
    assert float(a) == pytest.approx(2 * 3**0.5)
    assert a.same_value(RootRational(Fraction(1), Fraction(12)))
    assert not a.same_value(RootRational(Fraction(-1), Fraction(12)))


def test_window_is_graded_ball():
    win = BasisWindow.ball(3, 2, 4)
    assert all(lam.size <= 4 for lam in win)
    assert [lam.size for lam in win] == sorted(lam.size for lam in win)
    assert len(win.coset(DominantWeight((1, 0, 0)))) < len(win)
    assert DominantWeight((2, 1, 0)) in win


def test_order_one_entry_small_case():
    # |α|² · (−2 m_θ + 4) applied to J_0 = 1, re-expanded: 2·4 − 2·2·(J_θ − 4/3) = 40/3 on the diagonal
    c = CouplingData(2, 2)
    col = wk_column(DominantWeight.zero(2), 1, c)
    assert col[DominantWeight.zero(2)] == Fraction(40, 3)
    assert col[DominantWeight((2, 0))] == -4


@pytest.mark.parametrize("N,K,p", [(2, 25, 0.05), (3, 3, 0.02)])
def test_matrix_matches_quadrature_assembly(N, K, p):
    """Quadrature of the lattice-sum ℘ against Jack polynomials reproduces the exact pipeline."""
    win = BasisWindow.ball(N, 2, 6 if N == 2 else 4)
    grid = QuadratureGrid(N, Fraction(2), 64 if N == 2 else 40)
    exact = t_matrix(p, win, K).dense
    quad = quadrature_operator(win, p, grid, None if N == 2 else K)
    assert np.max(np.abs(exact - quad)) <= 1e-10


def test_exact_and_float_operator_agree():
    win = BasisWindow.ball(3, Fraction(3, 2), 5)
    a = t_matrix(Fraction(1, 50), win, 3)
    b = t_matrix(0.02, win, 3)
    assert a.exact is not None and b.exact is None
    assert a.is_symmetric() and b.is_symmetric()
    assert np.allclose(a.dense, b.dense, atol=1e-13)


def test_ledger_shrinks_with_window():
    lam = DominantWeight((2, 0))
    lost = []
    for L in (4, 6, 8, 10):
        m = wk_matrix(3, BasisWindow.ball(2, 2, L))
        lost.append(m.ledger[lam])
    assert lost[0] > 0
    assert all(b <= a for a, b in zip(lost, lost[1:]))
    assert lost[-1] == 0


def test_support_bound_is_attained():
    win = BasisWindow.ball(2, 2, 8)
    m = wk_matrix(2, win)
    assert max(weight_distance_sq(r, c) for r, c in m.entries) == 2 * 2 * 2


def test_coo_text_is_deterministic():
    win = BasisWindow.ball(3, 2, 4)
    assert wk_matrix(2, win).to_coo_text() == wk_matrix(2, win).to_coo_text()
    assert wk_matrix(2, win).decay_profile()


def test_bad_arguments():
    win = BasisWindow.ball(2, 2, 3)
    with pytest.raises(ValueError):
        wk_matrix(0, win)
    with pytest.raises(ValueError):
        t_matrix(1.0, win, 2)


def test_asymmetric_matrix_is_rejected():
    op = t_matrix(Fraction(1, 10), BasisWindow.ball(2, 2, 4), 1)
    (key, e), *_ = [(k, v) for k, v in op.exact.items() if k[0] != k[1]]
    op.exact[key] = RootRational(e.a + 1, e.s)
    with pytest.raises(AsymmetryError):
        diag_truncated(op)
    assert issubclass(AsymmetryError, ConsistencyError)
