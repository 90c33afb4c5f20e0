"""Exact integer/rational matrices.

A matrix is an integer numerator (numpy ``int64`` dense, scipy ``int64``
sparse, or numpy ``object`` holding Python ints) over one positive integer
denominator. ``int64`` is used only when a worst-case magnitude bound proves
the result fits; otherwise the operation falls back to Python integers.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Any, Sequence

import numpy as np
import scipy.sparse as sp

__all__ = ["ExactMatrix", "IndexMismatch", "rank_exact", "rank_mod_p"]

_SAFE = 2**62
Tag = Any  # (n, dim, q) for Grassmannian-indexed axes, None for untagged


class IndexMismatch(ValueError):
    pass


def _maxabs(a) -> int:
    if sp.issparse(a):
        return int(abs(a.data).max()) if a.nnz else 0
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a.flat)
    return int(np.abs(a).max())


def _to_object(a) -> np.ndarray:
    if sp.issparse(a):
        a = a.toarray()
    return a if a.dtype == object else a.astype(object)


def _dense(a) -> np.ndarray:
    return a.toarray() if sp.issparse(a) else a


def _scale(a, factor: int):
    if factor == 1:
        return a
    if _maxabs(a) * abs(factor) < _SAFE and (sp.issparse(a) or a.dtype != object):
        return a * np.int64(factor)
    return _to_object(a) * factor


class ExactMatrix:
    """Matrix with exact rational entries ``num / den``.

    ``rows`` and ``cols`` tag the index spaces; products and sums refuse to
    combine matrices whose tags disagree.
    """

    __slots__ = ("num", "den", "rows", "cols", "meta")

    def __init__(self, num, den: int = 1, rows: Tag = None, cols: Tag = None, meta: dict | None = None):
        if den <= 0:
            raise ValueError("denominator must be positive")
        if not sp.issparse(num):
            num = np.asarray(num)
            if num.dtype != object and num.dtype != np.int64:
                if not np.issubdtype(num.dtype, np.integer) and num.dtype != bool:
                    raise TypeError(f"non-integer numerator dtype {num.dtype}")
                num = num.astype(np.int64)
            if num.ndim != 2:
                raise ValueError("ExactMatrix needs a 2-d numerator")
        else:
            num = sp.csr_matrix(num, dtype=np.int64)
        self.num = num
        self.den = int(den)
        self.rows = rows
        self.cols = cols
        self.meta = meta or {}

    # construction helpers -------------------------------------------------
    @classmethod
    def identity(cls, size: int, tag: Tag = None) -> ExactMatrix:
        return cls(sp.identity(size, dtype=np.int64, format="csr"), 1, tag, tag)

    @classmethod
    def from_fractions(cls, rows: Sequence[Sequence], rtag: Tag = None, ctag: Tag = None) -> ExactMatrix:
        fr = [[Fraction(x) for x in r] for r in rows]
        den = lcm(1, *(x.denominator for r in fr for x in r))
        num = np.empty((len(fr), len(fr[0]) if fr else 0), dtype=object)
        for i, r in enumerate(fr):
            for j, x in enumerate(r):
                num[i, j] = x.numerator * (den // x.denominator)
        return cls(num, den, rtag, ctag).compact()

    @classmethod
    def column(cls, values: Sequence, tag: Tag = None) -> ExactMatrix:
        return cls.from_fractions([[v] for v in values], tag, None)

    # basic properties -----------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.num.shape

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.num)

    def __repr__(self) -> str:
        kind = "sparse" if self.is_sparse else str(self.num.dtype)
        return f"ExactMatrix({self.shape[0]}x{self.shape[1]}, {kind}, den={self.den})"

    def entry(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.num[i, j]), self.den)

    def to_fractions(self) -> list[list[Fraction]]:
        d = _dense(self.num)
        return [[Fraction(int(x), self.den) for x in row] for row in d]

    def dense(self) -> ExactMatrix:
        return ExactMatrix(_dense(self.num), self.den, self.rows, self.cols, self.meta)

    def compact(self) -> ExactMatrix:
        """Reduce to the smallest common denominator; move to int64 when it fits."""
        num, den = self.num, self.den
        if sp.issparse(num):
            g = int(np.gcd.reduce(np.abs(num.data))) if num.nnz else 0
        elif num.dtype == object:
            g = 0
            for x in num.flat:
                g = gcd(g, int(x))
                if g == 1:
                    break
        else:
            g = int(np.gcd.reduce(np.abs(num), axis=None)) if num.size else 0
        g = gcd(g, den) if g else den
        if g > 1:
            if sp.issparse(num):
                num = num.copy()
                num.data //= g
            else:
                num = num // g
            den //= g
        if not sp.issparse(num) and num.dtype == object and _maxabs(num) < _SAFE:
            num = num.astype(np.int64)
        return ExactMatrix(num, den, self.rows, self.cols, self.meta)

    @property
    def T(self) -> ExactMatrix:
        return ExactMatrix(self.num.T if not sp.issparse(self.num) else self.num.T.tocsr(), self.den, self.cols, self.rows)

    # arithmetic -----------------------------------------------------------
    @staticmethod
    def _match(a: Tag, b: Tag, what: str) -> None:
        if a is not None and b is not None and a != b:
            raise IndexMismatch(f"{what}: index spaces {a} and {b} differ")

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        if self.shape[1] != other.shape[0]:
            raise IndexMismatch(f"shapes {self.shape} @ {other.shape}")
        self._match(self.cols, other.rows, "product")
        a, b = self.num, other.num
        bound = self.shape[1] * _maxabs(a) * _maxabs(b)
        obj = (not sp.issparse(a) and a.dtype == object) or (not sp.issparse(b) and b.dtype == object)
        if bound < _SAFE and not obj:
            prod = a @ b
            if sp.issparse(prod):
                prod = prod.tocsr()
            elif isinstance(prod, np.matrix):
                prod = np.asarray(prod)
        else:
            prod = _to_object(a).dot(_to_object(b))
        return ExactMatrix(prod, self.den * other.den, self.rows, other.cols).compact()

    def _combine(self, other: ExactMatrix, sign: int) -> ExactMatrix:
        if self.shape != other.shape:
            raise IndexMismatch(f"shapes {self.shape} and {other.shape}")
        self._match(self.rows, other.rows, "sum rows")
        self._match(self.cols, other.cols, "sum cols")
        L = lcm(self.den, other.den)
        a = _scale(self.num, L // self.den)
        b = _scale(other.num, sign * (L // other.den))
        obj = any(not sp.issparse(x) and x.dtype == object for x in (a, b))
        if not obj and _maxabs(a) + _maxabs(b) < _SAFE:
            s = a + b
            if sp.issparse(s):
                s = s.tocsr()
            elif isinstance(s, np.matrix):
                s = np.asarray(s)
        else:
            s = _to_object(a) + _to_object(b)
        return ExactMatrix(s, L, self.rows or other.rows, self.cols or other.cols).compact()

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        return self._combine(other, 1)

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        return self._combine(other, -1)

    def __neg__(self) -> ExactMatrix:
        return self.scaled(-1)

    def scaled(self, c: Fraction | int) -> ExactMatrix:
        c = Fraction(c)
        if c == 0:
            z = sp.csr_matrix(self.shape, dtype=np.int64)
            return ExactMatrix(z, 1, self.rows, self.cols)
        num = _scale(self.num, c.numerator)
        return ExactMatrix(num, self.den * c.denominator, self.rows, self.cols).compact()

    __rmul__ = lambda self, c: self.scaled(c)  # noqa: E731

    # comparisons ----------------------------------------------------------
    def first_nonzero(self) -> tuple[int, int] | None:
        """Row-major first nonzero entry, or ``None`` for the zero matrix."""
        a = self.num
        if sp.issparse(a):
            a = a.tocsr()
            a.eliminate_zeros()
            if a.nnz == 0:
                return None
            r = int(np.flatnonzero(np.diff(a.indptr))[0])
            cols = a.indices[a.indptr[r] : a.indptr[r + 1]]
            return (r, int(cols.min()))
        nz = np.flatnonzero(a != 0) if a.dtype != object else [i for i, x in enumerate(a.flat) if x != 0]
        if len(nz) == 0:
            return None
        i = int(nz[0])
        return divmod(i, a.shape[1])

    def is_zero(self) -> bool:
        return self.first_nonzero() is None

    def residual_witness(self, other: ExactMatrix) -> dict | None:
        """``None`` when equal; otherwise the first differing entry."""
        diff = self - other
        w = diff.first_nonzero()
        if w is None:
            return None
        i, j = w
        return {"row": i, "col": j, "lhs": self.entry(i, j), "rhs": other.entry(i, j)}

    def equals(self, other: ExactMatrix) -> bool:
        return self.residual_witness(other) is None

    def is_symmetric(self) -> bool:
        return self.shape[0] == self.shape[1] and self.equals(self.T)

    def trace(self) -> Fraction:
        d = self.num.diagonal()
        return Fraction(sum(int(x) for x in d), self.den)

    def row_sums(self) -> list[Fraction]:
        s = self.num.sum(axis=1) if self.num.dtype != object else self.num.sum(axis=1)
        return [Fraction(int(x), self.den) for x in np.asarray(s).ravel()]

    def quadratic_form(self, x: Sequence) -> Fraction:
        v = ExactMatrix.column(x, self.cols)
        return (v.T @ self @ v).entry(0, 0)


# rank -------------------------------------------------------------------------

_P = 2**31 - 1


def rank_mod_p(M: ExactMatrix | np.ndarray, p: int = _P) -> int:
    """Rank of an integer matrix reduced modulo the prime ``p``."""
    if isinstance(M, ExactMatrix):
        M = M.num
    A = _dense(M)
    A = (np.array([[int(x) % p for x in row] for row in A], dtype=np.int64) if A.dtype == object else A % p)
    A = A.copy()
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if len(nz) == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = (A[r] * inv) % p
        below = np.flatnonzero(A[r + 1 :, c]) + r + 1
        if len(below):
            f = A[below, c][:, None]
            A[below] = (A[below] - (f * A[r][None, :]) % p) % p
        r += 1
    return r


def _rank_bareiss(A: np.ndarray) -> int:
    M = [[int(x) for x in row] for row in _dense(A)]
    rows, cols = len(M), len(M[0]) if M else 0
    r, prev = 0, 1
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, rows):
            M[i] = [(M[r][c] * M[i][j] - M[i][c] * M[r][j]) // prev for j in range(cols)]
        prev = M[r][c]
        r += 1
        if r == rows:
            break
    return r


def rank_exact(M: ExactMatrix, bareiss_limit: int = 300) -> tuple[int, str]:
    """Rank over the rationals.

    The rank modulo a prime never exceeds the rational rank, so a modular rank
    equal to ``min(rows, cols)`` is already exact. Otherwise fall back to
    fraction-free elimination when the matrix is small enough.
    """
    full = min(M.shape)
    best = 0
    for p in (_P, 2**31 - 19):
        best = max(best, rank_mod_p(M, p))
        if best == full:
            return best, "modular (full rank certificate)"
    if max(M.shape) <= bareiss_limit:
        return _rank_bareiss(M.num), "bareiss"
    raise ArithmeticError(f"rank not certified: modular rank {best} < {full} and matrix too large for Bareiss")
