"""Table-driven arithmetic in GF(q) for the prime powers q <= 9.

Element encoding: an integer ``0 <= a < q`` stands for the polynomial
``sum_j c_j x^j`` over GF(p) whose base-``p`` digits are ``c_0, c_1, ...``
(least significant first). For prime ``q`` that is just the residue. The
extension fields use fixed moduli::

    GF(4) = GF(2)[x] / (x^2 + x + 1)
    GF(8) = GF(2)[x] / (x^3 + x + 1)
    GF(9) = GF(3)[x] / (x^2 + 1)

The encoding is part of the family and cache file formats, so the moduli
never change.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from .qarith import prime_power_parts

SUPPORTED = (2, 3, 4, 5, 7, 8, 9)

# coefficient lists, constant term first, monic
MODULI: dict[int, tuple[int, ...]] = {4: (1, 1, 1), 8: (1, 1, 0, 1), 9: (1, 0, 1)}


def _digits(a: int, p: int, e: int) -> list[int]:
    out = []
    for _ in range(e):
        out.append(a % p)
        a //= p
    return out


def _undigits(c: list[int], p: int) -> int:
    return sum(x * p**j for j, x in enumerate(c))


def _polymulmod(a: list[int], b: list[int], modulus: tuple[int, ...], p: int) -> list[int]:
    e = len(modulus) - 1
    prod = [0] * (2 * e - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    # reduce using x^e = -(modulus[0] + ... + modulus[e-1] x^{e-1})
    for deg in range(len(prod) - 1, e - 1, -1):
        c = prod[deg]
        if c:
            prod[deg] = 0
            for t in range(e):
                prod[deg - e + t] = (prod[deg - e + t] - c * modulus[t]) % p
    return prod[:e]


def _is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    # degree <= 3: reducible iff it has a root in GF(p)
    if len(modulus) - 1 > 3:
        raise ValueError("irreducibility test only covers degree <= 3")
    return all(sum(c * x**j for j, c in enumerate(modulus)) % p for x in range(p))


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """A finite field GF(q), q <= 9, with full addition/multiplication tables."""

    q: int
    p: int
    e: int
    modulus: tuple[int, ...]
    add: np.ndarray = field(repr=False)
    mul: np.ndarray = field(repr=False)
    neg: np.ndarray = field(repr=False)
    inv: np.ndarray = field(repr=False)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldSpec) and (self.q, self.modulus) == (other.q, other.modulus)

    def __hash__(self) -> int:
        return hash((self.q, self.modulus))

    def _elem(self, a: int) -> int:
        if not (0 <= a < self.q):
            raise ValueError(f"{a!r} is not an element encoding of GF({self.q})")
        return int(a)

    def add_(self, a: int, b: int) -> int:
        return int(self.add[self._elem(a), self._elem(b)])

    def sub(self, a: int, b: int) -> int:
        return int(self.add[self._elem(a), self.neg[self._elem(b)]])

    def mul_(self, a: int, b: int) -> int:
        return int(self.mul[self._elem(a), self._elem(b)])

    def inverse(self, a: int) -> int:
        if self._elem(a) == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.q})")
        return int(self.inv[a])

    def describe(self) -> str:
        if self.e == 1:
            return f"GF({self.q})"
        terms = " + ".join(
            ("1" if j == 0 else "x" if j == 1 else f"x^{j}") if c == 1 else f"{c}x^{j}"
            for j, c in reversed(list(enumerate(self.modulus)))
            if c
        )
        return f"GF({self.p})[x]/({terms})"


def field_arithmetic(F: FieldSpec, a: int, b: int, op: str) -> int:
    if op == "add":
        return F.add_(a, b)
    if op == "mul":
        return F.mul_(a, b)
    raise ValueError(f"unknown op {op!r}")


def field_inverse(F: FieldSpec, a: int) -> int:
    return F.inverse(a)


def _verify_axioms(F: FieldSpec) -> None:
    q, add, mul = F.q, F.add, F.mul
    r = np.arange(q)
    if not (add[0] == r).all() or not (mul[1] == r).all():
        raise ArithmeticError(f"GF({q}): bad identities")
    if not (add == add.T).all() or not (mul == mul.T).all():
        raise ArithmeticError(f"GF({q}): not commutative")
    # associativity and distributivity over all triples
    a, b, c = np.meshgrid(r, r, r, indexing="ij")
    if not (add[add[a, b], c] == add[a, add[b, c]]).all():
        raise ArithmeticError(f"GF({q}): addition not associative")
    if not (mul[mul[a, b], c] == mul[a, mul[b, c]]).all():
        raise ArithmeticError(f"GF({q}): multiplication not associative")
    if not (mul[a, add[b, c]] == add[mul[a, b], mul[a, c]]).all():
        raise ArithmeticError(f"GF({q}): not distributive")
    for x in range(1, q):
        if sorted(mul[x]) != list(range(q)):
            raise ArithmeticError(f"GF({q}): {x} has no unique inverse")


@lru_cache(maxsize=None)
def make_field(q: int) -> FieldSpec:
    """Build and self-check GF(q) for q in {2, 3, 4, 5, 7, 8, 9}."""
    parts = prime_power_parts(q)
    if parts is None:
        raise ValueError(f"q={q!r} is not a prime power")
    if q not in SUPPORTED:
        raise ValueError(f"q={q} exceeds the desk-scale cap: supported fields are {SUPPORTED}")
    p, e = parts
    modulus = MODULI.get(q, (0, 1))
    if e > 1 and not _is_irreducible(modulus, p):
        raise ArithmeticError(f"modulus {modulus} is reducible over GF({p})")
    add = np.zeros((q, q), dtype=np.int64)
    mul = np.zeros((q, q), dtype=np.int64)
    for a, b in product(range(q), repeat=2):
        da, db = _digits(a, p, e), _digits(b, p, e)
        add[a, b] = _undigits([(x + y) % p for x, y in zip(da, db)], p)
        mul[a, b] = (a * b) % p if e == 1 else _undigits(_polymulmod(da, db, modulus, p), p)
    neg = np.array([int(np.flatnonzero(add[a] == 0)[0]) for a in range(q)], dtype=np.int64)
    inv = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
    for t in (add, mul, neg, inv):
        t.setflags(write=False)
    F = FieldSpec(q, p, e, tuple(modulus) if e > 1 else (), add, mul, neg, inv)
    _verify_axioms(F)
    return F
