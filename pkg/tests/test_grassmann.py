from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qekr.gfq import make_field
from qekr.grassmann import (
    CapExceeded,
    contains,
    count_disjoint,
    enumerate_subspaces,
    grassmannian,
    is_rref,
    meet_dim,
    rank,
    rref_canonical,
)
from qekr.qarith import gauss_binom

from oracles import prime_field_span


def test_rref_examples():
    F2, F5 = make_field(2), make_field(5)
    S = rref_canonical([(1, 1, 0), (0, 1, 1)], F2)
    assert S.basis == ((1, 0, 1), (0, 1, 1)) and S.pivots == (0, 1)
    assert rref_canonical([(0, 0, 0)], F2).dim == 0
    T = rref_canonical([(2, 4), (1, 2)], F5)
    assert T.dim == 1 and T.basis == ((1, 2),)


def test_rref_rejects_bad_input():
    with pytest.raises(ValueError):
        rref_canonical([(0, 5)], make_field(4))
    with pytest.raises(ValueError):
        rref_canonical([(1, 0), (1,)], make_field(2))


@pytest.mark.parametrize("n,k,q,count", [(4, 2, 2, 35), (3, 3, 3, 1), (7, 3, 2, 11811), (4, 2, 4, 357)])
def test_enumeration_sizes(n, k, q, count):
    G = grassmannian(n, k, q)
    assert len(G) == count == gauss_binom(n, k, q)
    assert all(is_rref(S.basis) for S in G)


def test_enumeration_oracle_spans():
    # independent oracle: all spans of pairs of vectors in F_2^4, deduplicated
    n, p = 4, 2
    vecs = [v for v in product(range(p), repeat=n) if any(v)]
    spans = {prime_field_span([u, v], p, n) for u in vecs for v in vecs}
    spans = {s for s in spans if len(s) == 4}
    G = grassmannian(n, 2, p)
    ours = {frozenset(map(tuple, S.vectors().tolist())) for S in G}
    assert ours == spans


def test_enumeration_order_is_deterministic():
    a = enumerate_subspaces(5, 2, 3)
    b = enumerate_subspaces(5, 2, make_field(3))
    assert a.subspaces == b.subspaces
    assert [S.pivots for S in a][:3] == [(0, 1)] * 3
    pivots = [S.pivots for S in a]
    assert pivots == sorted(pivots)


def test_cap():
    with pytest.raises(CapExceeded) as exc:
        enumerate_subspaces(8, 4, 2, cap=100)
    assert exc.value.required == gauss_binom(8, 4, 2)
    assert str(gauss_binom(8, 4, 2)) in str(exc.value)


def test_meet_dim_examples():
    F2, F3 = make_field(2), make_field(3)
    e = lambda i, n: tuple(int(j == i) for j in range(n))  # noqa: E731
    S = rref_canonical([e(0, 4)], F2)
    T = rref_canonical([e(1, 4)], F2)
    assert meet_dim(S, T) == 0 and meet_dim(S, S) == 1
    U = rref_canonical([e(0, 4), e(1, 4)], F3)
    V = rref_canonical([e(1, 4), e(2, 4)], F3)
    assert meet_dim(U, V) == 1
    with pytest.raises(ValueError):
        meet_dim(S, rref_canonical([e(0, 3)], F2))


@given(st.sampled_from([2, 3, 4, 5]), st.integers(2, 5), st.data())
def test_rref_is_row_operation_invariant(q, n, data):
    F = make_field(q)
    rows = data.draw(st.lists(st.lists(st.integers(0, q - 1), min_size=n, max_size=n), min_size=1, max_size=4))
    S = rref_canonical(rows, F, n)
    # mix rows with a random invertible combination: add c * row_j to row_i, then scale
    i, j = data.draw(st.integers(0, len(rows) - 1)), data.draw(st.integers(0, len(rows) - 1))
    c, s = data.draw(st.integers(0, q - 1)), data.draw(st.integers(1, q - 1))
    mixed = [list(r) for r in rows]
    if i != j:
        mixed[i] = [F.add_(a, F.mul_(c, b)) for a, b in zip(mixed[i], mixed[j])]
    mixed[i] = [F.mul_(s, a) for a in mixed[i]]
    assert rref_canonical(mixed, F, n) == S
    assert S.dim == rank(rows, F)
    assert len(S.vectors()) == q**S.dim


@given(st.sampled_from([2, 3]), st.data())
def test_meet_dim_grassmann_formula(q, data):
    G = grassmannian(4, 2, q)
    S = G[data.draw(st.integers(0, len(G) - 1))]
    T = G[data.draw(st.integers(0, len(G) - 1))]
    vs = {tuple(v) for v in S.vectors().tolist()}
    vt = {tuple(v) for v in T.vectors().tolist()}
    common = len(vs & vt)
    assert q ** meet_dim(S, T) == common
    assert contains(T, S) == (S == T)


def test_point_incidence_row_sums():
    G = grassmannian(5, 2, 3)
    rows = np.asarray(G.point_incidence.sum(axis=1)).ravel()
    assert set(rows.tolist()) == {gauss_binom(2, 1, 3)}


def test_count_disjoint_examples():
    F2, F3 = make_field(2), make_field(3)
    Z = rref_canonical([(1, 0, 0, 0), (0, 1, 0, 0)], F2)
    count, rep = count_disjoint(Z, 2)
    assert count == 16 == 2**4 * gauss_binom(2, 2, 2) and rep.passed
    Z3 = rref_canonical([(1, 0, 0, 0, 0), (0, 0, 1, 0, 0)], F3)
    assert count_disjoint(Z3, 2)[0] == 1053
    Z0 = rref_canonical([], F3, 5)
    assert count_disjoint(Z0, 2)[0] == gauss_binom(5, 2, 3)
