"""Subspaces of GF(q)^n in canonical RREF form, and full Grassmannian enumeration."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .gfq import FieldSpec, make_field
from .qarith import gauss_binom
from .report import Report, timed

log = logging.getLogger(__name__)

DEFAULT_CAP = 20_000


class CapExceeded(ValueError):
    """A Grassmannian is larger than the configured enumeration cap."""

    def __init__(self, n: int, k: int, q: int, size: int, cap: int):
        self.required = size
        super().__init__(
            f"[{n} {k}]_{q} = {size} subspaces exceeds cap {cap}; "
            f"pass cap>={size} to enumerate it anyway"
        )


@lru_cache(maxsize=None)
def _tables(F: FieldSpec) -> tuple[list[list[int]], list[list[int]], list[int], list[int]]:
    return F.add.tolist(), F.mul.tolist(), F.neg.tolist(), F.inv.tolist()


def _rref_rows(rows: Sequence[Sequence[int]], F: FieldSpec) -> tuple[list[list[int]], list[int]]:
    add, mul, neg, inv = _tables(F)
    M = [list(r) for r in rows]
    n = len(M[0]) if M else 0
    pivots: list[int] = []
    top = 0
    for col in range(n):
        pr = next((r for r in range(top, len(M)) if M[r][col]), None)
        if pr is None:
            continue
        M[top], M[pr] = M[pr], M[top]
        s = inv[M[top][col]]
        M[top] = [mul[s][x] for x in M[top]]
        for r in range(len(M)):
            c = M[r][col]
            if r != top and c:
                nc = neg[c]
                M[r] = [add[x][mul[nc][y]] for x, y in zip(M[r], M[top])]
        pivots.append(col)
        top += 1
        if top == len(M):
            break
    return M[:top], pivots


def rank(rows: Sequence[Sequence[int]], F: FieldSpec) -> int:
    if not rows:
        return 0
    return len(_rref_rows(rows, F)[1])


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of GF(q)^n held by its unique reduced row echelon basis."""

    n: int
    basis: tuple[tuple[int, ...], ...]
    pivots: tuple[int, ...]
    field: FieldSpec = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def q(self) -> int:
        return self.field.q

    def key(self) -> tuple:
        return self.basis

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.q, self.n, self.basis) == (other.q, other.n, other.basis)

    def __hash__(self) -> int:
        return hash((self.q, self.n, self.basis))

    def __repr__(self) -> str:
        rows = ",".join("".join(map(str, r)) for r in self.basis)
        return f"Subspace(q={self.q}, n={self.n}, dim={self.dim}, [{rows}])"

    def vectors(self) -> np.ndarray:
        """All ``q**dim`` vectors of the subspace as an array of shape (q**dim, n)."""
        F = self.field
        coeffs = np.array(list(product(range(F.q), repeat=self.dim)), dtype=np.int64).reshape(F.q**self.dim, self.dim)
        acc = np.zeros((len(coeffs), self.n), dtype=np.int64)
        B = np.array(self.basis, dtype=np.int64).reshape(self.dim, self.n)
        for r in range(self.dim):
            acc = F.add[acc, F.mul[coeffs[:, r : r + 1], B[r][None, :]]]
        return acc


def rref_canonical(rows: Iterable[Sequence[int]], F: FieldSpec, n: int | None = None) -> Subspace:
    """Canonical subspace spanned by ``rows`` (zero span gives dimension 0)."""
    rows = [tuple(int(x) for x in r) for r in rows]
    if not rows and n is None:
        raise ValueError("need at least one row or an explicit ambient dimension")
    n = len(rows[0]) if rows else n
    if any(len(r) != n for r in rows):
        raise ValueError("rows have different lengths")
    for r in rows:
        for x in r:
            if not (0 <= x < F.q):
                raise ValueError(f"{x} is not an element encoding of GF({F.q})")
    M, piv = _rref_rows(rows, F) if rows else ([], [])
    return Subspace(n, tuple(tuple(r) for r in M), tuple(piv), F)


def zero_subspace(n: int, F: FieldSpec) -> Subspace:
    return Subspace(n, (), (), F)


def is_rref(basis: Sequence[Sequence[int]]) -> bool:
    last = -1
    piv = []
    for r in basis:
        nz = [j for j, x in enumerate(r) if x]
        if not nz or nz[0] <= last or r[nz[0]] != 1:
            return False
        last = nz[0]
        piv.append(last)
    return all(basis[s][p] == 0 for t, p in enumerate(piv) for s in range(len(basis)) if s != t)


def meet_dim(S: Subspace, T: Subspace) -> int:
    """``dim(S & T) = dim S + dim T - rank([S; T])``."""
    if S.n != T.n or S.field != T.field:
        raise ValueError("subspaces live in different ambient spaces")
    stacked = list(S.basis) + list(T.basis)
    return S.dim + T.dim - rank(stacked, S.field)


def contains(T: Subspace, S: Subspace) -> bool:
    """Whether ``S <= T``."""
    return meet_dim(S, T) == S.dim


class GrassmannIndex:
    """All ``k``-subspaces of GF(q)^n in a fixed, platform-independent order.

    Order: pivot sets in lexicographic order, then the free entries of the RREF
    basis read row-major, lexicographically. The index is immutable once built.
    """

    def __init__(self, n: int, k: int, F: FieldSpec, subspaces: list[Subspace]):
        self.n, self.k, self.field = n, k, F
        self.subspaces = tuple(subspaces)
        self.index = {S.basis: i for i, S in enumerate(self.subspaces)}
        if len(self.index) != len(self.subspaces):
            raise ValueError("duplicate subspaces in Grassmannian")

    @property
    def q(self) -> int:
        return self.field.q

    def __len__(self) -> int:
        return len(self.subspaces)

    def __getitem__(self, i: int) -> Subspace:
        return self.subspaces[i]

    def __iter__(self):
        return iter(self.subspaces)

    def __repr__(self) -> str:
        return f"GrassmannIndex(n={self.n}, k={self.k}, q={self.q}, size={len(self)})"

    def position(self, S: Subspace) -> int:
        if S.n != self.n or S.dim != self.k or S.field != self.field:
            raise KeyError(f"{S!r} is not in {self!r}")
        return self.index[S.basis]

    @property
    def tag(self) -> tuple[int, int, int]:
        """Index-space tag used to match matrix rows/columns."""
        return (self.n, self.k, self.q)

    @cached_property
    def point_incidence(self) -> sp.csr_matrix:
        """0/1 matrix (subspaces x points): entry 1 iff the 1-space lies in the subspace.

        Two subspaces meet nontrivially iff they share a point, and
        ``S <= T`` iff all ``[dim S, 1]`` points of ``S`` lie in ``T``.
        """
        return _point_incidence(self)


def _enumerate_bases(n: int, k: int, q: int):
    for piv in combinations(range(n), k):
        pset = set(piv)
        free = [(r, c) for r, p in enumerate(piv) for c in range(p + 1, n) if c not in pset]
        for vals in product(range(q), repeat=len(free)):
            B = [[0] * n for _ in range(k)]
            for r, p in enumerate(piv):
                B[r][p] = 1
            for (r, c), v in zip(free, vals):
                B[r][c] = v
            yield piv, tuple(tuple(row) for row in B)


def enumerate_subspaces(n: int, k: int, F: FieldSpec | int, cap: int = DEFAULT_CAP) -> GrassmannIndex:
    """Enumerate ``[V k]`` for ``V = GF(q)^n``; refuses sizes above ``cap``."""
    if isinstance(F, int):
        F = make_field(F)
    if not (0 <= k <= n):
        raise ValueError(f"need 0 <= k <= n, got n={n} k={k}")
    size = gauss_binom(n, k, F.q)
    if size > cap:
        raise CapExceeded(n, k, F.q, size, cap)
    subs = [Subspace(n, B, piv, F) for piv, B in _enumerate_bases(n, k, F.q)]
    if len(subs) != size:
        raise ArithmeticError(f"enumerated {len(subs)} subspaces, expected {size}")
    return GrassmannIndex(n, k, F, subs)


@lru_cache(maxsize=64)
def grassmannian(n: int, k: int, q: int, cap: int = DEFAULT_CAP) -> GrassmannIndex:
    """Memoized :func:`enumerate_subspaces` keyed by ``(n, k, q)``."""
    return enumerate_subspaces(n, k, make_field(q), cap=cap)


def _codes(vectors: np.ndarray, q: int) -> np.ndarray:
    n = vectors.shape[-1]
    weights = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return vectors @ weights


def _point_incidence(G: GrassmannIndex) -> sp.csr_matrix:
    n, k, F = G.n, G.k, G.field
    q = F.q
    pts = grassmannian(n, 1, q, cap=max(DEFAULT_CAP, gauss_binom(n, 1, q))) if k != 1 else G
    lookup = np.full(q**n, -1, dtype=np.int64)
    P = np.array([S.basis[0] for S in pts], dtype=np.int64).reshape(len(pts), n)
    lookup[_codes(P, q)] = np.arange(len(pts))
    if k == 0:
        return sp.csr_matrix((len(G), len(pts)), dtype=np.int64)
    # coefficient vectors whose first nonzero entry is 1 give each point once
    coeffs = np.array(
        [c for c in product(range(q), repeat=k) if any(c) and c[next(i for i, x in enumerate(c) if x)] == 1],
        dtype=np.int64,
    )
    per = len(coeffs)
    cols = np.empty((len(G), per), dtype=np.int64)
    for idx, S in enumerate(G.subspaces):
        B = np.array(S.basis, dtype=np.int64)
        acc = np.zeros((per, n), dtype=np.int64)
        for r in range(k):
            acc = F.add[acc, F.mul[coeffs[:, r : r + 1], B[r][None, :]]]
        cols[idx] = lookup[_codes(acc, q)]
    if (cols < 0).any():
        raise ArithmeticError("vector combination is not a normalized point")
    rows = np.repeat(np.arange(len(G)), per)
    data = np.ones(len(rows), dtype=np.int64)
    M = sp.csr_matrix((data, (rows, cols.ravel())), shape=(len(G), len(pts)))
    if M.max() != 1:
        raise ArithmeticError("repeated point in a subspace")
    return M


def count_disjoint(Z: Subspace, l: int, G: GrassmannIndex | None = None) -> tuple[int, Report]:
    """Count ``l``-subspaces meeting ``Z`` trivially, by scanning; compare with
    ``q^{l m} [n-m l]``."""
    n, m, q = Z.n, Z.dim, Z.q
    report = Report("disjoint_count", {"n": n, "m": m, "l": l, "q": q})
    with timed(report):
        if m + l > n:
            raise ValueError(f"need m + l <= n, got m={m} l={l} n={n}")
        G = grassmannian(n, l, q) if G is None else G
        if (G.n, G.k, G.field) != (n, l, Z.field):
            raise ValueError("Grassmannian does not match Z and l")
        count = sum(1 for W in G if meet_dim(Z, W) == 0)
        closed = q ** (l * m) * gauss_binom(n - m, l, q)
        report.residual_zero = count == closed
        report.require(count == closed, "scan vs closed form", scan=count, closed_form=closed)
        report.details = {"scan": count, "closed_form": closed}
    return count, report
