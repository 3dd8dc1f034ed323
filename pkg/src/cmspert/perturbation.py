"""Rayleigh–Schrödinger series in the nome for eigenpairs of T(p).

Exact path
----------
For an isolated level λ the eigenvector is carried in the unnormalized Jack
basis as v(p) = ‖J_λ‖⁻¹ Σ_μ b_μ(p) J_μ with rational b.  Its coordinates in the
normalized basis are c_μ = b_μ·√s_μ, s_μ = ‖J_μ‖²/‖J_λ‖², so everything stays
rational and the square roots are carried symbolically.

Degenerate levels
-----------------
Block members in different Q-cosets never interact, so each is handled by the
exact path.  Members that can interact are treated numerically with a Bloch
effective Hamiltonian; if no available order lifts the degeneracy an
:class:`UnresolvedDegeneracy` is raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Protocol, Sequence

import numpy as np

from .assembly import BasisWindow, RootRational, wk_column, wk_matrix
from .jack import ConsistencyError, norm_sq_ratio
from .lattice import (
    CouplingData,
    DominantWeight,
    basis_sort_key,
    dominance_leq,
    dominated_partitions,
    highest_root,
    same_coset,
    sorted_weights,
    trig_eigenvalue,
)

__all__ = [
    "SeriesCoeffs",
    "DegenerateBlock",
    "NonDegenerate",
    "UnresolvedDegeneracy",
    "DegenerateInputError",
    "WindowTooSmall",
    "OperatorSeries",
    "EllipticOperator",
    "coupling_ball",
    "degeneracy_scan",
    "rs_series",
    "joint_series",
    "degenerate_block_series",
    "block_order1_spectrum",
    "series_eval",
    "SeriesValue",
    "check_eigen_identity",
    "check_normalization",
    "window_for",
]


class UnresolvedDegeneracy(RuntimeError):
    """A degenerate block that the available orders do not split."""

    def __init__(
        self,
        block: "DegenerateBlock",
        residual_norm: float,
        order: int,
        resolved: Sequence["SeriesCoeffs"] = (),
        unresolved_energies: Sequence[tuple[int, list[float]]] = (),
    ):
        self.block = block
        self.residual_norm = float(residual_norm)
        self.order = order
        # branches that did split, and (multiplicity, energy series) of those that did not
        self.resolved = list(resolved)
        self.unresolved_energies = list(unresolved_energies)
        names = ", ".join(str(m) for m in block.members)
        super().__init__(
            f"unresolved degeneracy among {{{names}}} through order {order}; residual norm {self.residual_norm:.3g}"
        )


class DegenerateInputError(ValueError):
    """rs_series was asked for a level that is degenerate inside its coupling ball."""


class WindowTooSmall(ValueError):
    def __init__(self, missing: Sequence[DominantWeight]):
        self.missing = list(missing)
        super().__init__(
            f"basis window misses {len(self.missing)} weight(s) of the coupling ball, e.g. {self.missing[0]}"
        )


# --------------------------------------------------------------------------
# operator interface


class OperatorSeries(Protocol):
    """A p-series of operators diagonal at p = 0 in the Jack basis."""

    def diagonal(self, lam: DominantWeight) -> Fraction: ...

    def column(self, lam: DominantWeight, k: int) -> Mapping[DominantWeight, Fraction]: ...


@dataclass(frozen=True)
class EllipticOperator:
    """T(p) = H₀ + Σ pᵏ W_k in the Jack basis."""

    coupling: CouplingData

    def diagonal(self, lam: DominantWeight) -> Fraction:
        return trig_eigenvalue(lam, self.coupling)

    def column(self, lam: DominantWeight, k: int) -> Mapping[DominantWeight, Fraction]:
        return wk_column(lam, k, self.coupling)


# --------------------------------------------------------------------------
# data types


@dataclass
class SeriesCoeffs:
    """Perturbation data of one level through order K.

    ``energy[k]`` is E^{k}; ``vectors[k]`` maps μ to the normalized-basis
    coefficient c^{k}_μ (a :class:`RootRational` on the exact path, a float
    otherwise).  On the exact path ``b`` and ``ratios`` hold the rational
    Jack-basis data with c^{k}_μ = b[k][μ]·√ratios[μ].
    """

    label: DominantWeight
    K: int
    energy: list
    vectors: list[dict]
    exact: bool
    beta: Fraction
    b: list[dict[DominantWeight, Fraction]] | None = None
    ratios: dict[DominantWeight, Fraction] | None = None
    joint_energy: list[list[Fraction]] | None = None

    @property
    def N(self) -> int:
        return self.label.N

    def energy_floats(self) -> list[float]:
        return [float(e) for e in self.energy]

    def vector_floats(self, k: int) -> dict[DominantWeight, float]:
        return {mu: float(v) for mu, v in self.vectors[k].items()}

    def support(self) -> list[DominantWeight]:
        seen: set[DominantWeight] = set()
        for vec in self.vectors:
            seen.update(vec)
        return sorted_weights(seen)


@dataclass(frozen=True)
class NonDegenerate:
    label: DominantWeight
    energy: Fraction


@dataclass
class DegenerateBlock:
    """Dominant weights sharing one unperturbed energy."""

    members: tuple[DominantWeight, ...]
    energy: Fraction
    coupling: CouplingData

    @classmethod
    def from_members(cls, members, c: CouplingData) -> "DegenerateBlock":
        members = tuple(sorted_weights(set(members)))
        if not members:
            raise ValueError("empty degenerate block")
        energies = {trig_eigenvalue(m, c) for m in members}
        if len(energies) != 1:
            raise ValueError(f"block members have different energies: {sorted(energies)}")
        return cls(members, energies.pop(), c)

    def block_matrix(self, k: int) -> list[list[RootRational]]:
        """Order-k matrix restricted to the block (normalized basis, exact)."""
        c = self.coupling
        out = []
        for r in self.members:
            row = []
            for col in self.members:
                a = wk_column(col, k, c).get(r, Fraction(0))
                row.append(RootRational(a, norm_sq_ratio(r, col, c)))
            out.append(row)
        return out


# --------------------------------------------------------------------------
# coupling balls


@lru_cache(maxsize=None)
def _step(parts: tuple[int, ...], j: int) -> frozenset[DominantWeight]:
    """{ν ∈ P₊ : ν ⪯ κ + jθ and κ ⪯ ν + jθ}."""
    kappa = DominantWeight(parts)
    jt = DominantWeight(tuple(j * x for x in highest_root(len(parts)).parts))
    top = kappa + jt
    out = set()
    for nu_parts in dominated_partitions(top.parts):
        nu = DominantWeight(nu_parts)
        if dominance_leq(kappa, nu + jt):
            out.add(nu)
    return frozenset(out)


def _divisors(k: int) -> list[int]:
    return [j for j in range(1, k + 1) if k % j == 0]


@lru_cache(maxsize=None)
def _ball_layers(parts: tuple[int, ...], K: int) -> tuple[frozenset[DominantWeight], ...]:
    layers = [frozenset({DominantWeight(parts)})]
    for k in range(1, K + 1):
        cur = set(layers[k - 1])
        for kp in range(1, k + 1):
            for j in _divisors(kp):
                for kappa in layers[k - kp]:
                    cur |= _step(kappa.parts, j)
        layers.append(frozenset(cur))
    return tuple(layers)


def coupling_ball(lam: DominantWeight, K: int) -> frozenset[DominantWeight]:
    """Weights reachable from λ through order K of the potential."""
    if K < 0:
        raise ValueError("K must be >= 0")
    return _ball_layers(lam.parts, int(K))[int(K)]


def window_for(lam: DominantWeight, K: int, beta) -> BasisWindow:
    """Smallest degree ball containing coupling_ball(λ, K)."""
    L = max(mu.size for mu in coupling_ball(lam, K))
    return BasisWindow.ball(lam.N, beta, L)


def degeneracy_scan(lam: DominantWeight, K: int, c: CouplingData) -> NonDegenerate | DegenerateBlock:
    e = trig_eigenvalue(lam, c)
    same = [mu for mu in coupling_ball(lam, K) if trig_eigenvalue(mu, c) == e]
    if len(same) == 1:
        return NonDegenerate(lam, e)
    return DegenerateBlock.from_members(same, c)


# --------------------------------------------------------------------------
# exact non-degenerate recursion


def _check_window(lam: DominantWeight, K: int, win: BasisWindow, c: CouplingData) -> None:
    if win.N != c.N or win.beta != c.beta:
        raise ValueError("window and coupling disagree on N or beta")
    if lam not in win:
        raise WindowTooSmall([lam])
    missing = [mu for mu in sorted_weights(coupling_ball(lam, K)) if mu not in win]
    if missing:
        raise WindowTooSmall(missing)


def rs_series(
    lam: DominantWeight,
    K: int,
    win: BasisWindow,
    operators: Sequence[OperatorSeries] | None = None,
) -> SeriesCoeffs:
    """Exact Rayleigh–Schrödinger coefficients of the level λ through order K."""
    c = win.coupling
    if lam.N != c.N:
        raise ValueError("rank mismatch between label and window")
    scan = degeneracy_scan(lam, K, c)
    if isinstance(scan, DegenerateBlock):
        raise DegenerateInputError(
            f"{lam} is degenerate with {[str(m) for m in scan.members if m != lam]} inside its coupling ball; "
            "use degenerate_block_series"
        )
    _check_window(lam, K, win, c)
    ops = list(operators) if operators is not None else [EllipticOperator(c)]
    if not ops:
        raise ValueError("at least one operator is required")
    return _rs_exact(lam, K, ops, c)


def joint_series(
    lam: DominantWeight, K: int, win: BasisWindow, operators: Sequence[OperatorSeries]
) -> SeriesCoeffs:
    """Common eigenvector series of a commuting family; vectors come from operators[0]."""
    return rs_series(lam, K, win, operators)


def _rs_exact(lam: DominantWeight, K: int, ops: Sequence[OperatorSeries], c: CouplingData) -> SeriesCoeffs:
    main = ops[0]
    e_lam = main.diagonal(lam)
    layers = _ball_layers(lam.parts, int(K))

    b: list[dict[DominantWeight, Fraction]] = [{lam: Fraction(1)}]
    ratios: dict[DominantWeight, Fraction] = {lam: Fraction(1)}
    energies: list[Fraction] = [e_lam]

    def apply(op: OperatorSeries, k: int) -> dict[DominantWeight, Fraction]:
        """y_k = Σ_{k'=1}^{k} W_{k'} b^{k-k'} in the Jack basis."""
        y: dict[DominantWeight, Fraction] = {}
        for kp in range(1, k + 1):
            for mu, bm in b[k - kp].items():
                for nu, a in op.column(mu, kp).items():
                    y[nu] = y.get(nu, Fraction(0)) + a * bm
        return y

    for k in range(1, K + 1):
        y = apply(main, k)
        ek = y.get(lam, Fraction(0)) - sum(
            (energies[kp] * b[k - kp].get(lam, Fraction(0)) for kp in range(1, k)), Fraction(0)
        )
        bk: dict[DominantWeight, Fraction] = {}
        for mu, ymu in y.items():
            if mu == lam:
                continue
            num = ymu - sum((energies[kp] * b[k - kp].get(mu, Fraction(0)) for kp in range(1, k)), Fraction(0))
            if not num:
                continue
            if mu not in layers[k]:
                raise ConsistencyError(f"order-{k} coefficient at {mu} outside the coupling ball of {lam}")
            den = e_lam - main.diagonal(mu)
            if den == 0:
                raise DegenerateInputError(f"zero denominator at {mu} for level {lam}")
            bk[mu] = num / den
            if mu not in ratios:
                ratios[mu] = norm_sq_ratio(mu, lam, c)
        # intermediate normalization fixed by (v, v) = 1
        diag = Fraction(0)
        for kp in range(1, k):
            left, right = b[kp], b[k - kp]
            for mu, x in left.items():
                r = right.get(mu)
                if r:
                    diag += x * r * ratios[mu]
        # the order-k term of Σ b·b·s is 2 b^k_λ + diag
        bl = -diag / 2
        if bl:
            bk[lam] = bl
        b.append(bk)
        energies.append(ek)

    joint = None
    if len(ops) > 1:
        joint = []
        for op in ops:
            e0 = op.diagonal(lam)
            es = [e0]
            for k in range(1, K + 1):
                y: dict[DominantWeight, Fraction] = {}
                for kp in range(1, k + 1):
                    for mu, bm in b[k - kp].items():
                        for nu, a in op.column(mu, kp).items():
                            if nu == lam:
                                y[nu] = y.get(nu, Fraction(0)) + a * bm
                es.append(
                    y.get(lam, Fraction(0))
                    - sum((es[kp] * b[k - kp].get(lam, Fraction(0)) for kp in range(1, k)), Fraction(0))
                )
            joint.append(es)

    vectors = [{mu: RootRational(v, ratios[mu]) for mu, v in bk.items()} for bk in b]
    return SeriesCoeffs(lam, int(K), energies, vectors, True, c.beta, b, ratios, joint)


# --------------------------------------------------------------------------
# identity checks


def check_eigen_identity(s: SeriesCoeffs, win: BasisWindow) -> bool:
    """Graded components of (H₀ + Σ pᵏ d^{k})(Σ pᵏ c^{k}) = (Σ pᵏ E^{k})(Σ pᵏ c^{k}), exactly.

    The d^{k} are taken from the order-k matrices of ``win`` in the normalized
    basis; products of square roots are collapsed exactly via
    s_{νμ}·s_μ = s_ν before comparing rational parts.
    """
    if not s.exact:
        raise ValueError("exact identity check needs an exact series")
    c = win.coupling
    lam = s.label
    mats = [None] + [wk_matrix(k, win) for k in range(1, s.K + 1)]
    # d^{k'}_{νμ} by column
    cols: list[dict[DominantWeight, list[tuple[DominantWeight, RootRational]]]] = [dict()]
    for m in mats[1:]:
        by_col: dict[DominantWeight, list] = {}
        for (r, col), e in m.entries.items():
            by_col.setdefault(col, []).append((r, e))
        cols.append(by_col)

    def ratio(nu: DominantWeight) -> Fraction:
        if s.ratios is not None and nu in s.ratios:
            return s.ratios[nu]
        return norm_sq_ratio(nu, lam, c)

    for k in range(0, s.K + 1):
        lhs: dict[DominantWeight, Fraction] = {}  # rational part, multiplies √ratio(ν)
        for mu, cm in s.vectors[k].items():
            lhs[mu] = lhs.get(mu, Fraction(0)) + trig_eigenvalue(mu, c) * cm.a
        for kp in range(1, k + 1):
            for mu, cm in s.vectors[k - kp].items():
                for nu, d in cols[kp].get(mu, []):
                    if d.s * cm.s != ratio(nu):
                        raise ConsistencyError(f"norm ratios do not telescope at ({nu}, {mu})")
                    lhs[nu] = lhs.get(nu, Fraction(0)) + d.a * cm.a
        rhs: dict[DominantWeight, Fraction] = {}
        for kp in range(0, k + 1):
            for mu, cm in s.vectors[k - kp].items():
                if cm.s != ratio(mu):
                    raise ConsistencyError(f"inconsistent ratio at {mu}")
                rhs[mu] = rhs.get(mu, Fraction(0)) + s.energy[kp] * cm.a
        keys = set(lhs) | set(rhs)
        if any(lhs.get(x, 0) != rhs.get(x, 0) for x in keys):
            return False
    return True


def check_normalization(s: SeriesCoeffs) -> bool:
    """Graded components of (v(p), v(p)) equal δ_{k0} exactly (exact series) or to 1e-10."""
    for k in range(0, len(s.vectors)):
        total: Fraction | float = Fraction(0) if s.exact else 0.0
        for kp in range(0, k + 1):
            left, right = s.vectors[kp], s.vectors[k - kp]
            for mu, x in left.items():
                y = right.get(mu)
                if y is None:
                    continue
                if s.exact:
                    if x.s != y.s:
                        return False
                    total += x.a * y.a * x.s
                else:
                    total += x * y
        want = 1 if k == 0 else 0
        if s.exact:
            if total != want:
                return False
        elif abs(total - want) > 1e-10:
            return False
    return True


# --------------------------------------------------------------------------
# degenerate blocks


def _components(block: DegenerateBlock, K: int) -> list[list[DominantWeight]]:
    members = list(block.members)
    parent = {m: m for m in members}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, a in enumerate(members):
        ball_a = coupling_ball(a, K + 1)
        for bb in members[i + 1 :]:
            if same_coset(a, bb) and (bb in ball_a or a in coupling_ball(bb, K + 1)):
                parent[find(a)] = find(bb)
    groups: dict[DominantWeight, list[DominantWeight]] = {}
    for m in members:
        groups.setdefault(find(m), []).append(m)
    return [sorted_weights(g) for g in groups.values()]


def block_order1_spectrum(block: DegenerateBlock) -> list:
    """Eigenvalues of the order-1 block matrix; exact when the matrix is diagonal."""
    M = block.block_matrix(1)
    n = len(M)
    if all(M[i][j].a == 0 for i in range(n) for j in range(n) if i != j):
        return sorted(M[i][i].a for i in range(n))
    dense = np.array([[float(x) for x in row] for row in M])
    return sorted(np.linalg.eigvalsh(dense).tolist())


def degenerate_block_series(block: DegenerateBlock, K: int, win: BasisWindow) -> list[SeriesCoeffs]:
    """One series per block member (branch), orthonormal through order K."""
    if len(block.members) == 1:
        return [rs_series(block.members[0], K, win)]
    out: list[SeriesCoeffs] = []
    for comp in _components(block, K):
        if len(comp) == 1:
            out.append(rs_series(comp[0], K, win))
        else:
            sub = DegenerateBlock.from_members(comp, block.coupling)
            out.extend(_float_block_series(sub, K, win))
    return out


def _float_block_series(block: DegenerateBlock, K: int, win: BasisWindow) -> list[SeriesCoeffs]:
    c = block.coupling
    order = K + 1
    need: set[DominantWeight] = set()
    for m in block.members:
        need |= coupling_ball(m, order)
    missing = [mu for mu in sorted_weights(need) if mu not in win]
    if missing:
        raise WindowTooSmall(missing)
    sub = win.coset(block.members[0])
    labels = list(sub.labels)
    idx = {lam: i for i, lam in enumerate(labels)}
    n = len(labels)
    Hs = [np.diag([float(trig_eigenvalue(lam, c)) for lam in labels])]
    for k in range(1, order + 1):
        m = wk_matrix(k, sub)
        A = np.zeros((n, n))
        for (r, col), e in m.entries.items():
            A[idx[r], idx[col]] = float(e)
        Hs.append(A)
    P = [idx[m] for m in block.members]
    out = []
    stuck: list[_Branch] = []
    for br in _branches(Hs, P, order):
        if br.U is None:
            stuck.append(br)
            continue
        U = _normalize_series(br.U)[: K + 1]
        E = [float(x) for x in br.E[: K + 1]]
        lead = max(block.members, key=lambda m: abs(U[0][idx[m]]))
        vectors = [{labels[i]: float(v[i]) for i in range(n) if v[i] != 0.0} for v in U]
        out.append(SeriesCoeffs(lead, int(K), E, vectors, False, c.beta))
    if stuck:
        raise UnresolvedDegeneracy(
            block,
            max(br.residual for br in stuck),
            K,
            resolved=out,
            unresolved_energies=[(br.size, [float(x) for x in br.E[: K + 1]]) for br in stuck],
        )
    return out


@dataclass
class _Branch:
    """One eigen-branch; U is None when the branch is a still-degenerate group."""

    E: list[float]
    U: list[np.ndarray] | None
    size: int = 1
    residual: float = 0.0


def _group(values: np.ndarray, tol: float = 1e-9) -> list[list[int]]:
    order = np.argsort(values)
    groups: list[list[int]] = []
    for i in order:
        if groups and abs(values[i] - values[groups[-1][-1]]) <= tol * max(1.0, abs(values[i])):
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
    return groups


def _rs_general(Hs: list[np.ndarray], i: int, order: int) -> tuple[list[float], list[np.ndarray]]:
    """Non-degenerate RS with intermediate normalization for a possibly non-symmetric series."""
    d = np.real(np.diag(Hs[0]))
    n = len(d)
    e0 = d[i]
    den = e0 - d
    den[i] = 1.0
    if np.any(np.abs(den) < 1e-12):
        raise ConsistencyError("near-zero denominator in non-degenerate recursion")
    E = [float(e0)]
    U = [np.eye(n)[i]]
    for k in range(1, order + 1):
        y = np.zeros(n)
        for kp in range(1, min(k, len(Hs) - 1) + 1):
            y = y + Hs[kp] @ U[k - kp]
        ek = float(y[i])
        rhs = y - sum((E[kp] * U[k - kp] for kp in range(1, k)), np.zeros(n))
        u = rhs / den
        u[i] = 0.0
        E.append(ek)
        U.append(u)
    return E, U


def _branches(Hs: list[np.ndarray], P: list[int], order: int) -> list[_Branch]:
    """Eigen-branches of Σ pᵏ Hs[k] emanating from the degenerate diagonal set P."""
    n = Hs[0].shape[0]
    if len(P) == 1:
        E, U = _rs_general(Hs, P[0], order)
        return [_Branch(E, U)]
    d = np.real(np.diag(Hs[0]))
    e0 = float(np.mean(d[P]))
    if order < 1:
        return [_Branch([e0], None, len(P), 0.0)]
    Q = [i for i in range(n) if i not in set(P)]
    dq = d[Q]
    gap = e0 - dq
    small = np.abs(gap) < 1e-12
    # Bloch wave operator Ω = P + X and effective Hamiltonian h_k on P
    X = [np.zeros((len(Q), len(P)))]
    h = [e0 * np.eye(len(P))]
    for k in range(1, order + 1):
        hk = Hs[k][np.ix_(P, P)].copy()
        for kp in range(1, k):
            hk += Hs[kp][np.ix_(P, Q)] @ X[k - kp]
        h.append(hk)
        rhs = Hs[k][np.ix_(Q, P)].copy()
        for kp in range(1, k):
            rhs += Hs[kp][np.ix_(Q, Q)] @ X[k - kp]
        for j in range(1, k):
            rhs -= X[k - j] @ h[j]
        xk = np.zeros_like(rhs)
        ok = ~small
        xk[ok] = rhs[ok] / gap[ok, None]
        if np.any(np.abs(rhs[small]) > 1e-10):
            raise ConsistencyError("degenerate state outside the block couples to it")
        X.append(xk)
    # effective p-series G(p) = Σ h_{k+1} p^k, diagonalized at leading order
    G = [h[k + 1] for k in range(order)]
    g0 = G[0]
    if np.allclose(g0, g0.T, atol=1e-12):
        vals, V = np.linalg.eigh((g0 + g0.T) / 2)
        Vinv = V.T
    else:
        vals, V = np.linalg.eig(g0)
        vals, V = np.real(vals), np.real(V)
        Vinv = np.linalg.inv(V)
    Gt = [Vinv @ g @ V for g in G]
    Gt[0] = np.diag(vals)
    out = []
    for grp in _group(vals):
        for br in _branches(Gt, grp, order - 1):
            E = [e0] + list(br.E)
            if br.U is None:
                # residual: non-scalar part of the stuck group's effective block at all orders
                resid = 0.0
                for g in Gt[1:]:
                    blk = g[np.ix_(grp, grp)]
                    resid = max(resid, float(np.linalg.norm(blk - np.trace(blk) / len(grp) * np.eye(len(grp)))))
                out.append(_Branch(E, None, br.size, max(br.residual, resid)))
                continue
            # P-space vector u = V w, then Ω u graded
            Ucomp = [V @ w for w in br.U]
            full = []
            for k in range(len(Ucomp)):
                v = np.zeros(n)
                v[P] += Ucomp[k]
                for j in range(1, k + 1):
                    v[Q] += X[j] @ Ucomp[k - j]
                full.append(v)
            out.append(_Branch(E, full))
    return out


def _normalize_series(U: list[np.ndarray]) -> list[np.ndarray]:
    """Scale v(p) by n(p)^{-1/2}, n = (v, v), order by order; leading sign made positive."""
    K = len(U) - 1
    nrm = [sum(float(U[j] @ U[k - j]) for j in range(k + 1)) for k in range(K + 1)]
    q = [1.0 / nrm[0]]
    for k in range(1, K + 1):
        q.append(-sum(nrm[j] * q[k - j] for j in range(1, k + 1)) / nrm[0])
    r = [math.sqrt(q[0])]
    for k in range(1, K + 1):
        r.append((q[k] - sum(r[j] * r[k - j] for j in range(1, k))) / (2 * r[0]))
    out = [sum((r[j] * U[k - j] for j in range(k + 1)), np.zeros_like(U[0])) for k in range(K + 1)]
    lead = int(np.argmax(np.abs(out[0])))
    if out[0][lead] < 0:
        out = [-v for v in out]
    return out


# --------------------------------------------------------------------------
# evaluation


@dataclass
class SeriesValue:
    energy: float
    vector: dict[DominantWeight, float]
    tail_estimate: float


def series_eval(s: SeriesCoeffs, p: float) -> SeriesValue:
    """Horner evaluation with a ratio-test tail estimate (heuristic, not a bound)."""
    p = float(p)
    e = 0.0
    for coef in reversed(s.energy):
        e = e * p + float(coef)
    vec: dict[DominantWeight, float] = {}
    for k, ck in enumerate(s.vectors):
        pk = p**k
        for mu, v in ck.items():
            vec[mu] = vec.get(mu, 0.0) + float(v) * pk
    tail = 0.0
    if p != 0 and len(s.energy) >= 3:
        last, prev = abs(float(s.energy[-1])), abs(float(s.energy[-2]))
        if last and prev:
            x = abs(p * last / prev)
            K = len(s.energy) - 1
            tail = last * abs(p) ** K * x / (1 - x) if x < 1 else math.inf
    return SeriesValue(e, vec, tail)
