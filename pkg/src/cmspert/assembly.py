"""Truncated gauge-transformed elliptic Hamiltonian in the normalized Jacobi basis.

Entries are kept exact as pairs (a, s) meaning a·√s, where a is a Jack-basis
coefficient and s = ‖J_row‖²/‖J_col‖².  For a fixed (row, col) pair the ratio
s is the same at every order, so sums over orders stay exact pairs.
"""

from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .elliptic import potential_order
from .jack import ConsistencyError, jack, jack_expand, norm_sq_ratio
from .lattice import (
    CouplingData,
    DominantWeight,
    basis_sort_key,
    partitions,
    same_coset,
    trig_eigenvalue,
)
from .sympoly import poly_mul

__all__ = [
    "ROOT_LENGTH_SQ",
    "RootRational",
    "BasisWindow",
    "OrderKMatrix",
    "TruncatedOperator",
    "wk_column",
    "wk_matrix",
    "t_matrix",
    "weight_distance_sq",
]

log = logging.getLogger(__name__)

# |α|² for every root of A_{N-1}; the order-k potential of the Hamiltonian is
# |α|²·β(β-1)Σ_{α>0} t_k(⟨α,h⟩).
ROOT_LENGTH_SQ = 2


@dataclass(frozen=True)
class RootRational:
    """a·√s with rational a and positive rational s."""

    a: Fraction
    s: Fraction = Fraction(1)

    def __float__(self) -> float:
        return float(self.a) * math.sqrt(self.s.numerator / self.s.denominator) if self.a else 0.0

    def square(self) -> Fraction:
        return self.a * self.a * self.s

    def same_value(self, other: "RootRational") -> bool:
        """Exact equality of a√s and b√t."""
        if (self.a > 0) != (other.a > 0) or (self.a < 0) != (other.a < 0):
            return False
        return self.square() == other.square()

    def __str__(self) -> str:
        return f"{self.a}" if self.s == 1 else f"{self.a}*sqrt({self.s})"


def weight_distance_sq(a: DominantWeight, b: DominantWeight) -> Fraction:
    """|a - b|² in the ε-realization."""
    return sum(((x - y) ** 2 for x, y in zip(a.coords, b.coords)), Fraction(0))


@dataclass(frozen=True)
class BasisWindow:
    """Ordered finite set of dominant weights, normally the ball |λ̲|⋆ ≤ L."""

    N: int
    beta: Fraction
    L: int
    labels: tuple[DominantWeight, ...]

    @classmethod
    def ball(cls, N: int, beta, L: int) -> "BasisWindow":
        c = CouplingData(N, Fraction(beta))
        if L < 0:
            raise ValueError("cutoff L must be >= 0")
        labels = []
        for n in range(L + 1):
            for p in partitions(n, N):
                if p[-1] == 0:
                    labels.append(DominantWeight(p))
        return cls(c.N, c.beta, int(L), tuple(sorted(labels, key=basis_sort_key)))

    @property
    def coupling(self) -> CouplingData:
        return CouplingData(self.N, self.beta)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[DominantWeight]:
        return iter(self.labels)

    def __contains__(self, lam: object) -> bool:
        return lam in self._index

    @property
    def _index(self) -> dict[DominantWeight, int]:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {lam: i for i, lam in enumerate(self.labels)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def index(self, lam: DominantWeight) -> int:
        return self._index[lam]

    def coset(self, lam: DominantWeight) -> "BasisWindow":
        """Sub-window of labels in the Q-coset of lam."""
        labs = tuple(mu for mu in self.labels if same_coset(mu, lam))
        return BasisWindow(self.N, self.beta, self.L, labs)


# --------------------------------------------------------------------------
# columns


_COL_LOCK = threading.Lock()


@lru_cache(maxsize=None)
def _column(parts: tuple[int, ...], beta: Fraction, k: int) -> tuple[tuple[DominantWeight, Fraction], ...]:
    N = len(parts)
    c = CouplingData(N, beta)
    pot = potential_order(k, c).poly
    lam = DominantWeight(parts)
    prod = poly_mul(pot, jack(lam, c).expansion)
    coeffs = jack_expand(prod, c).coeffs
    return tuple(sorted(((mu, ROOT_LENGTH_SQ * a) for mu, a in coeffs.items() if a), key=lambda t: basis_sort_key(t[0])))


def wk_column(lam: DominantWeight, k: int, c: CouplingData) -> dict[DominantWeight, Fraction]:
    """Jack-basis coordinates of W_k J_λ (no norm factors, no truncation)."""
    if k < 1:
        raise ValueError("order k must be >= 1")
    with _COL_LOCK:
        return dict(_column(lam.parts, c.beta, int(k)))


# --------------------------------------------------------------------------
# order-k matrices


@dataclass
class OrderKMatrix:
    """Order-k coupling matrix; ``entries[(row, col)]`` is a :class:`RootRational`."""

    k: int
    basis: BasisWindow
    entries: dict[tuple[DominantWeight, DominantWeight], RootRational]
    ledger: dict[DominantWeight, float] = field(default_factory=dict)

    def get(self, row: DominantWeight, col: DominantWeight) -> RootRational:
        return self.entries.get((row, col), RootRational(Fraction(0)))

    def symmetry_violations(self) -> list[tuple[DominantWeight, DominantWeight]]:
        bad = []
        for (r, c), e in self.entries.items():
            other = self.entries.get((c, r))
            if other is None or not e.same_value(other):
                bad.append((r, c))
        return bad

    def is_symmetric(self) -> bool:
        return not self.symmetry_violations()

    def support_violations(self) -> list[tuple[DominantWeight, DominantWeight]]:
        bound = 2 * self.k * self.k
        return [
            (r, c)
            for (r, c) in self.entries
            if not same_coset(r, c) or weight_distance_sq(r, c) > bound
        ]

    def support_ok(self) -> bool:
        return not self.support_violations()

    def to_dense(self) -> np.ndarray:
        n = len(self.basis)
        out = np.zeros((n, n))
        for (r, c), e in self.entries.items():
            out[self.basis.index(r), self.basis.index(c)] = float(e)
        return out

    def decay_profile(self) -> dict[float, float]:
        """max |entry| per distance |row - col|, logged at debug level."""
        prof: dict[Fraction, float] = {}
        for (r, c), e in self.entries.items():
            d = weight_distance_sq(r, c)
            prof[d] = max(prof.get(d, 0.0), abs(float(e)))
        out = {math.sqrt(d): v for d, v in sorted(prof.items())}
        log.debug("order %d decay profile: %s", self.k, out)
        return out

    def ledger_total(self) -> float:
        return sum(self.ledger.values())

    def to_coo_text(self) -> str:
        """One line per entry: row, col, a_num/a_den, s_num/s_den; sorted by the basis order."""
        lines = []
        for (r, c) in sorted(self.entries, key=lambda rc: (self.basis.index(rc[0]), self.basis.index(rc[1]))):
            e = self.entries[(r, c)]
            lines.append(
                f"{r}\t{c}\t{e.a.numerator}/{e.a.denominator}\t{e.s.numerator}/{e.s.denominator}"
            )
        return "\n".join(lines) + ("\n" if lines else "")


def wk_matrix(k: int, win: BasisWindow) -> OrderKMatrix:
    """Order-k matrix on the window; couplings leaving the window go to the ledger."""
    if k < 1:
        raise ValueError("order k must be >= 1")
    if not len(win):
        raise ValueError("empty basis window")
    c = win.coupling
    entries: dict[tuple[DominantWeight, DominantWeight], RootRational] = {}
    ledger: dict[DominantWeight, float] = {}
    for lam in win:
        lost = 0.0
        for mu, a in wk_column(lam, k, c).items():
            e = RootRational(a, norm_sq_ratio(mu, lam, c))
            if mu in win:
                entries[(mu, lam)] = e
            else:
                lost += float(e) ** 2
        ledger[lam] = lost
    return OrderKMatrix(int(k), win, entries, ledger)


# --------------------------------------------------------------------------
# full truncated operator


@dataclass
class TruncatedOperator:
    """T(p) = H₀ + Σ_{k≤K} pᵏ W_k on a window.

    ``exact`` maps (row, col) to RootRational when p is rational, else is None.
    """

    basis: BasisWindow
    p: float | Fraction
    K: int
    diagonal: tuple[Fraction, ...]
    orders: list[OrderKMatrix]
    exact: dict[tuple[DominantWeight, DominantWeight], RootRational] | None
    dense: np.ndarray

    def is_symmetric(self) -> bool:
        if self.exact is not None:
            for (r, c), e in self.exact.items():
                o = self.exact.get((c, r))
                if o is None or not e.same_value(o):
                    return False
            return True
        return all(m.is_symmetric() for m in self.orders)


def t_matrix(p, win: BasisWindow, K: int, orders: Sequence[OrderKMatrix] | None = None) -> TruncatedOperator:
    if not abs(float(p)) < 1:
        raise ValueError(f"|p| must be < 1, got {p}")
    if K < 0:
        raise ValueError("K must be >= 0")
    c = win.coupling
    diag = tuple(trig_eigenvalue(lam, c) for lam in win)
    if orders is None:
        orders = [wk_matrix(k, win) for k in range(1, K + 1)]
    else:
        orders = list(orders)[:K]
    n = len(win)
    dense = np.diag(np.array([float(e) for e in diag]))
    exact = None
    if isinstance(p, (int, Fraction)):
        p = Fraction(p)
        acc: dict[tuple[DominantWeight, DominantWeight], RootRational] = {
            (lam, lam): RootRational(e) for lam, e in zip(win, diag)
        }
        for m in orders:
            pk = p**m.k
            for key, e in m.entries.items():
                prev = acc.get(key)
                if prev is None:
                    acc[key] = RootRational(pk * e.a, e.s)
                else:
                    if prev.s != e.s and prev.a != 0:
                        raise ConsistencyError(f"norm ratio mismatch at {key}")
                    acc[key] = RootRational(prev.a + pk * e.a, e.s)
        exact = {k_: v for k_, v in acc.items() if v.a}
        for (r, col), e in exact.items():
            dense[win.index(r), win.index(col)] = float(e)
    else:
        pf = float(p)
        for m in orders:
            dense = dense + pf**m.k * m.to_dense()
    return TruncatedOperator(win, p, int(K), diag, orders, exact, dense)
