"""Exact Gaussian binomials, q-brackets and the q-binomial-theorem identities.

Everything here is integer or :class:`fractions.Fraction` arithmetic. ``q`` is
always a concrete prime power; there is no symbolic ``q``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

from .report import Report, timed

__all__ = [
    "is_prime_power",
    "prime_power_parts",
    "gauss_binom",
    "bracket",
    "TruncatedSeries",
    "check_q_binomial_identities",
    "check_e11",
]


def prime_power_parts(q: int) -> tuple[int, int] | None:
    """Return ``(p, e)`` with ``q == p**e`` and ``p`` prime, or ``None``."""
    if not isinstance(q, int) or isinstance(q, bool) or q < 2:
        return None
    p = 2
    while p * p <= q:
        if q % p == 0:
            break
        p += 1
    else:
        return (q, 1)
    e = 0
    while q % p == 0:
        q //= p
        e += 1
    return (p, e) if q == 1 else None


def is_prime_power(q: int) -> bool:
    return prime_power_parts(q) is not None


def _check_q(q: int) -> None:
    if not is_prime_power(q):
        raise ValueError(f"q={q!r} is not a prime power")


@lru_cache(maxsize=None)
def _gauss_binom(m: int, k: int, q: int) -> int:
    if k < 0:
        return 0
    if k == 0:
        return 1
    if m < k:
        return 0
    # Multiply/divide alternately: after step i the running value is [m-k+i+1, i+1],
    # an integer, so every division must be exact.
    value = 1
    for i in range(k):
        value *= q ** (m - k + 1 + i) - 1
        quot, rem = divmod(value, q ** (i + 1) - 1)
        if rem:
            raise ArithmeticError(f"inexact division in [{m} {k}]_{q} at step {i}")
        value = quot
    return value


def gauss_binom(m: int, k: int, q: int) -> int:
    """Gaussian binomial coefficient ``[m k]_q``.

    ``[m 0] = 1`` for every ``m``, ``[m k] = 0`` for negative ``k``, and
    ``[m k] = 0`` whenever ``0 <= m < k``. Negative ``m`` with ``k >= 1`` is
    rejected (the product formula would give a non-integer).

    >>> gauss_binom(4, 2, 2)
    35
    """
    _check_q(q)
    if not isinstance(m, int) or not isinstance(k, int):
        raise TypeError("gauss_binom takes integer m and k")
    if k >= 1 and m < 0:
        raise ValueError(f"negative m={m} with k={k} >= 1")
    return _gauss_binom(m, k, q)


def bracket(x: int, i: int, q: int) -> int:
    """``[x]_i = prod_{j<i} (q**(x-j) - 1)``; signed if ``x < i``.

    Factors with ``x - j < 0`` are rational; they are only allowed when the
    product still comes out integral (it is zero as soon as ``x - j == 0``).
    """
    _check_q(q)
    if i < 0:
        raise ValueError("bracket needs i >= 0")
    value = Fraction(1)
    for j in range(i):
        value *= Fraction(q) ** (x - j) - 1
    if value.denominator != 1:
        raise ValueError(f"[{x}]_{i} is not an integer for q={q}")
    return value.numerator


class TruncatedSeries:
    """Power series with exact rational coefficients, kept through degree ``N``."""

    __slots__ = ("coeffs", "N")

    def __init__(self, coeffs: Iterable[int | Fraction], N: int):
        if N < 0:
            raise ValueError("truncation degree must be >= 0")
        c = [Fraction(x) for x in coeffs][: N + 1]
        c += [Fraction(0)] * (N + 1 - len(c))
        self.coeffs: tuple[Fraction, ...] = tuple(c)
        self.N = N

    def __getitem__(self, j: int) -> Fraction:
        return self.coeffs[j]

    def __len__(self) -> int:
        return self.N + 1

    def _common(self, other: TruncatedSeries) -> int:
        return min(self.N, other.N)

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        N = self._common(other)
        return TruncatedSeries((self[j] + other[j] for j in range(N + 1)), N)

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        N = self._common(other)
        return TruncatedSeries((self[j] - other[j] for j in range(N + 1)), N)

    def __mul__(self, other: TruncatedSeries) -> TruncatedSeries:
        N = self._common(other)
        out = [Fraction(0)] * (N + 1)
        for a in range(N + 1):
            if self[a]:
                for b in range(N + 1 - a):
                    out[a + b] += self[a] * other[b]
        return TruncatedSeries(out, N)

    def reciprocal(self) -> TruncatedSeries:
        if self[0] == 0:
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        inv = [Fraction(0)] * (self.N + 1)
        inv[0] = 1 / self[0]
        for j in range(1, self.N + 1):
            s = sum((self[t] * inv[j - t] for t in range(1, j + 1)), Fraction(0))
            inv[j] = -s * inv[0]
        return TruncatedSeries(inv, self.N)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.N == other.N and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"TruncatedSeries({[str(c) for c in self.coeffs]}, N={self.N})"


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _first_mismatch(lhs: Sequence, rhs: Sequence) -> int | None:
    for j, (x, y) in enumerate(zip(lhs, rhs)):
        if x != y:
            return j
    return None


def check_q_binomial_identities(m: int, q: int, z: Fraction | int = Fraction(1, 3), N: int | None = None) -> Report:
    """Check the finite and the reciprocal q-binomial theorem for one ``m``.

    Finite form: ``prod_{i<m}(1 - q^i z) = sum_j (-1)^j q^C(j,2) [m j] z^j``,
    coefficient-wise and at the sample point ``z``. Reciprocal form:
    ``1/prod_{i<m}(1 - q^i z) = sum_j [m+j-1 j] z^j`` through degree ``N``.
    """
    N = m if N is None else N
    report = Report("q_binomial_identities", {"m": m, "q": q, "z": Fraction(z), "N": N})
    with timed(report):
        _check_q(q)
        if m < 1:
            raise ValueError("m must be >= 1")
        if N < m:
            report.fail({"failed": "truncation", "N": N, "needed": m}, status="truncation-too-small")
            return report
        z = Fraction(z)
        prod = [1]
        for i in range(m):
            prod = _poly_mul(prod, [1, -(q**i)])
        rhs = [(-1) ** j * q ** comb(j, 2) * gauss_binom(m, j, q) for j in range(m + 1)]
        finite_res = [x - y for x, y in zip(prod, rhs)]
        bad = _first_mismatch(prod, rhs)
        if bad is not None:
            report.fail({"identity": "finite", "coefficient": bad, "lhs": prod[bad], "rhs": rhs[bad]})
        at_z_lhs = Fraction(1)
        for i in range(m):
            at_z_lhs *= 1 - q**i * z
        at_z_rhs = sum((c * z**j for j, c in enumerate(rhs)), Fraction(0))
        report.require(at_z_lhs == at_z_rhs, "finite identity at sample z", lhs=at_z_lhs, rhs=at_z_rhs)

        inv = TruncatedSeries(prod, N).reciprocal()
        expected = TruncatedSeries((gauss_binom(m + j - 1, j, q) for j in range(N + 1)), N)
        recip_res = inv - expected
        bad = _first_mismatch(inv.coeffs, expected.coeffs)
        if bad is not None:
            report.fail({"identity": "reciprocal", "coefficient": bad, "lhs": inv[bad], "rhs": expected[bad]})
        max_res = max(abs(x) for x in list(finite_res) + list(recip_res.coeffs))
        report.residual_zero = max_res == 0
        report.details = {
            "max_residual": max_res,
            "finite_coefficients": prod,
            "value_at_z": at_z_lhs,
            "series_terms_checked": N + 1,
        }
    return report


def e11_sides(n: int, d: int, r: int, q: int) -> tuple[int, int]:
    lhs = sum(
        (-1) ** (i - r) * q ** comb(i - r, 2) * gauss_binom(d - r, i - r, q) * gauss_binom(n - i - r, d - i, q)
        for i in range(r, d + 1)
    )
    rhs = q ** ((d - r) ** 2) * gauss_binom(n - d - r, d - r, q)
    return lhs, rhs


def check_e11(n: int, d: int, r: int, q: int) -> Report:
    """Alternating Gaussian-binomial sum behind the quadratic-form coefficient match.

    ``sum_{i=r}^{d} (-1)^{i-r} q^C(i-r,2) [d-r i-r][n-i-r d-i] = q^{(d-r)^2} [n-d-r d-r]``.
    Also checks the generating-function identity it is read off from, through
    degree ``d - r``.
    """
    report = Report("e11", {"n": n, "d": d, "r": r, "q": q})
    with timed(report):
        _check_q(q)
        if not (0 <= r <= d and n >= 2 * d):
            raise ValueError(f"need 0 <= r <= d and n >= 2d, got n={n} d={d} r={r}")
        lhs, rhs = e11_sides(n, d, r, q)
        report.residual_zero = lhs == rhs
        report.require(lhs == rhs, "closed form", lhs=lhs, rhs=rhs)

        # prod_{s<d-r}(1-q^s z) * 1/prod_{s<=n-d-r}(1-q^s z) = 1/prod_{d-r<=s<=n-d-r}(1-q^s z)
        N = d - r
        left = TruncatedSeries(
            ((-1) ** s * q ** comb(s, 2) * gauss_binom(d - r, s, q) for s in range(N + 1)), N
        ) * TruncatedSeries((gauss_binom(n - d - r + t, t, q) for t in range(N + 1)), N)
        right = TruncatedSeries(
            (gauss_binom(n - 2 * d + t, t, q) * q ** ((d - r) * t) for t in range(N + 1)), N
        )
        bad = _first_mismatch(left.coeffs, right.coeffs)
        if bad is not None:
            report.residual_zero = False
            report.fail({"identity": "generating function", "coefficient": bad, "lhs": left[bad], "rhs": right[bad]})
        report.details = {"lhs": lhs, "rhs": rhs, "series_degree": N}
    return report
