"""Independent float checks: torus quadrature, Galerkin diagonalization, rank counts.

The torus is parametrized by h = Σ_i t_i α_i with t ∈ [0, 2π)^{N-1}; every
e^μ with μ ∈ P is 2π-periodic in each t_i, and the normalized Haar measure is
the uniform measure in t.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .assembly import BasisWindow, TruncatedOperator, t_matrix
from .elliptic import Nome, t_k_value, wp_regular
from .jack import ConsistencyError, jack
from .lattice import DominantWeight, partition_orbit, same_coset, trig_eigenvalue
from .perturbation import (
    SeriesCoeffs,
    coupling_ball,
    rs_series,
    series_eval,
    window_for,
)
from .sympoly import SymPoly

__all__ = [
    "QuadratureGrid",
    "SpectralReport",
    "AsymmetryError",
    "CircleTouchesSpectrum",
    "quad_inner",
    "quad_inner_estimate",
    "quadrature_operator",
    "diag_truncated",
    "projection_rank",
    "convergence_probe",
    "ProbeReport",
    "oracle_eigenvalue",
]

RESIDUAL_TOL = 1e-10


class AsymmetryError(ConsistencyError):
    """The assembled matrix is not exactly symmetric."""


class CircleTouchesSpectrum(ValueError):
    pass


@dataclass
class QuadratureGrid:
    """Periodic trapezoid rule with n points per direction on the fundamental torus."""

    N: int
    beta: Fraction
    n: int = 64
    t: np.ndarray = field(init=False, repr=False)
    x: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    delta_sq: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.N not in (2, 3):
            raise ValueError("quadrature grids are provided for N = 2 and 3 only")
        self.beta = Fraction(self.beta)
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        axes = [2 * math.pi * np.arange(self.n) / self.n] * (self.N - 1)
        mesh = np.meshgrid(*axes, indexing="ij")
        t = np.stack([m.ravel() for m in mesh])  # (N-1, M)
        M = t.shape[1]
        # ε-coordinates of Σ t_i α_i: x_j = t_j - t_{j-1}
        x = np.zeros((self.N, M))
        for i in range(self.N - 1):
            x[i] += t[i]
            x[i + 1] -= t[i]
        self.t, self.x = t, x
        self.weights = np.full(M, 1.0 / M)
        d2 = np.ones(M)
        b2 = 2 * float(self.beta)
        for i in range(self.N):
            for j in range(i + 1, self.N):
                d2 *= np.abs(np.sin((x[i] - x[j]) / 2)) ** b2
        self.delta_sq = d2

    def refined(self) -> "QuadratureGrid":
        return QuadratureGrid(self.N, self.beta, 2 * self.n)

    def evaluate(self, f: SymPoly) -> np.ndarray:
        """Values of f at the grid points."""
        if f.N != self.N:
            raise ValueError("rank mismatch between polynomial and grid")
        out = np.zeros(self.x.shape[1], dtype=complex)
        for lam, c in f.items():
            s = float(lam.shift)
            for a in partition_orbit(lam.parts):
                phase = np.zeros(self.x.shape[1])
                for aj, xj in zip(a, self.x):
                    if aj - s:
                        phase += (aj - s) * xj
                out += float(c) * np.exp(1j * phase)
        return out

    def pair_potential(self, p: float, K: int | None = None) -> np.ndarray:
        """Σ_{i<j} |α|²β(β-1)(℘ - 1/(4sin²) + 1/12)(x_i - x_j); K truncates the nome series."""
        g = 2 * float(self.beta * (self.beta - 1))
        out = np.zeros(self.x.shape[1])
        if g == 0 or p == 0:
            return out
        for i in range(self.N):
            for j in range(i + 1, self.N):
                d = self.x[i] - self.x[j]
                if K is None:
                    out += wp_regular(d, Nome(p).tau)
                else:
                    out += sum(p**k * np.vectorize(lambda y, k=k: t_k_value(k, y))(d) for k in range(1, K + 1))
        return g * out


def quad_inner(f: SymPoly, g: SymPoly, grid: QuadratureGrid) -> float:
    """(f, g)_Δ = ∫ conj(f) g Δ² dμ by the periodic trapezoid rule (real part)."""
    v = np.sum(grid.weights * grid.delta_sq * np.conj(grid.evaluate(f)) * grid.evaluate(g))
    return float(v.real)


def quad_inner_estimate(f: SymPoly, g: SymPoly, grid: QuadratureGrid) -> tuple[float, float]:
    """Value on the refined grid and |difference| to the base grid."""
    a = quad_inner(f, g, grid)
    b = quad_inner(f, g, grid.refined())
    return b, abs(b - a)


def quadrature_operator(win: BasisWindow, p: float, grid: QuadratureGrid, K: int | None = None) -> np.ndarray:
    """Dense T(p) on the window assembled by quadrature against the lattice-sum ℘.

    Uses only the Jack polynomials themselves (their H₀ eigenvalues and their
    quadrature norms), not the exact matrix pipeline.
    """
    if win.N != grid.N or win.beta != grid.beta:
        raise ValueError("window and grid disagree on N or beta")
    c = win.coupling
    vals = [grid.evaluate(jack(lam, c).expansion) for lam in win]
    wd = grid.weights * grid.delta_sq
    norms = [math.sqrt(float(np.sum(wd * np.abs(v) ** 2))) for v in vals]
    pot = grid.pair_potential(float(p), K)
    n = len(win)
    M = np.zeros((n, n))
    labels = list(win)
    for i in range(n):
        M[i, i] = float(trig_eigenvalue(labels[i], c))
        for j in range(i, n):
            if not same_coset(labels[i], labels[j]):
                continue
            v = float(np.sum(wd * pot * np.conj(vals[i]) * vals[j]).real) / (norms[i] * norms[j])
            M[i, j] += v
            if i != j:
                M[j, i] += v
    return M


# --------------------------------------------------------------------------
# spectra


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    labels: tuple[DominantWeight, ...]
    L: int
    p: float
    K: int
    deltas: dict = field(default_factory=dict)

    def overlap_index(self, lam: DominantWeight) -> int:
        """Eigenpair with the largest weight on the basis vector of λ."""
        i = self.labels.index(lam)
        return int(np.argmax(np.abs(self.vectors[i, :])))


def _report(M: np.ndarray, labels, L: int, p: float, K: int) -> SpectralReport:
    w, V = np.linalg.eigh(M)
    res = np.linalg.norm(M @ V - V * w, axis=0)
    scale = max(1.0, float(np.max(np.abs(w)))) if len(w) else 1.0
    if len(res) and float(np.max(res)) > RESIDUAL_TOL * scale:
        raise ConsistencyError(f"eigen-residual {float(np.max(res)):.3g} exceeds tolerance")
    return SpectralReport(w, V, res, tuple(labels), L, p, K)


def diag_truncated(m: TruncatedOperator) -> SpectralReport:
    """Full symmetric eigendecomposition after an exact symmetry check."""
    if not m.is_symmetric():
        raise AsymmetryError("truncated operator is not symmetric")
    return _report(m.dense, m.basis.labels, m.basis.L, float(m.p), m.K)


def projection_rank(p: float, center, radius: float, win: BasisWindow, K: int, guard: float = 10 * RESIDUAL_TOL) -> int:
    """Number of Galerkin eigenvalues inside |ζ - center| < radius."""
    rep = diag_truncated(t_matrix(p, win, K))
    dist = np.abs(rep.eigenvalues - float(center))
    if np.any(np.abs(dist - radius) <= guard * max(1.0, abs(float(center)))):
        raise CircleTouchesSpectrum(f"an eigenvalue lies within the guard band of the circle r={radius}")
    return int(np.sum(dist < radius))


def oracle_eigenvalue(lam: DominantWeight, p: float, win: BasisWindow, K: int) -> float:
    rep = diag_truncated(t_matrix(p, win, K))
    return float(rep.eigenvalues[rep.overlap_index(lam)])


@dataclass
class ProbeReport:
    p_list: list[float]
    errors: list[float]
    exponent: float
    passed: bool
    exact: bool
    K: int


def convergence_probe(
    lam: DominantWeight,
    K: int,
    win: BasisWindow,
    p_list: Sequence[float],
    series: SeriesCoeffs | None = None,
    oracle_K: int | None = None,
) -> ProbeReport:
    """Fit log|series(p) - oracle(p)| against log p; pass when the slope is ≥ K + 1/2."""
    if series is None:
        swin = win
        if any(mu not in win for mu in coupling_ball(lam, K)):
            swin = window_for(lam, K, win.beta)
        series = rs_series(lam, K, swin)
    if oracle_K is None:
        oracle_K = 3 * K + 3
    orders = None
    errs = []
    from .assembly import wk_matrix

    orders = [wk_matrix(k, win) for k in range(1, oracle_K + 1)]
    for p in p_list:
        rep = diag_truncated(t_matrix(p, win, oracle_K, orders))
        e = float(rep.eigenvalues[rep.overlap_index(lam)])
        errs.append(abs(series_eval(series, p).energy - e))
    scale = max(1.0, abs(float(series.energy[0])))
    if all(e <= 1e-14 * scale for e in errs):
        return ProbeReport(list(map(float, p_list)), errs, math.inf, True, True, K)
    lp = np.log(np.asarray(p_list, dtype=float))
    le = np.log(np.maximum(np.asarray(errs), 1e-300))
    slope = float(np.polyfit(lp, le, 1)[0])
    return ProbeReport(list(map(float, p_list)), errs, slope, slope >= K + 0.5, False, K)
