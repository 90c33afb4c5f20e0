import random
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qekr.grassmann import grassmannian
from qekr.qarith import gauss_binom
from qekr.schemes import (
    OverBudget,
    build_disjointness,
    build_incidence,
    component_sqnorms_from_degrees,
    identity_tasks,
    kneser_eigenvalue,
    lemma26_eigenvalue,
    project,
    projection_report,
    projector_set,
    qkneser_adjacency,
    spectrum,
    spectrum_report,
    sqnorm,
    verify_lemma24,
    verify_lemma25,
    verify_lemma26,
    verify_lemma27,
)


def test_incidence_examples():
    W0 = build_incidence(0, 2, 2, 4)
    assert W0.shape == (1, 35) and all(x == 1 for x in W0.to_fractions()[0])
    W12 = build_incidence(1, 2, 2, 3)
    col_sums = np.asarray(W12.num.sum(axis=0)).ravel()
    assert set(col_sums.tolist()) == {3}
    with pytest.raises(ValueError):
        build_incidence(2, 1, 2, 4)


@pytest.mark.parametrize("n,k,q,rowsum", [(4, 2, 2, 16), (5, 2, 2, 112)])
def test_kneser_row_sums(n, k, q, rowsum):
    M = qkneser_adjacency(grassmannian(n, k, q))
    assert set(M.row_sums()) == {rowsum}
    assert set(build_disjointness(k, k, q, n).row_sums()) == {rowsum}
    assert M.meta["scale_to_A"] == Fraction(1, q ** (k * k))


def test_single_vertex_kneser():
    M = qkneser_adjacency(grassmannian(3, 3, 2))
    assert M.to_fractions() == [[0]]


@pytest.mark.parametrize(
    "n,k,q,lams,mults",
    [
        (4, 2, 2, (1, Fraction(-1, 4), Fraction(1, 8)), (1, 14, 20)),
        (5, 2, 2, (7, Fraction(-3, 4), Fraction(1, 8)), (1, 30, 124)),
        (7, 3, 2, (15, Fraction(-7, 8), Fraction(3, 32), Fraction(-1, 64)), (1, 126, 2540, 9144)),
    ],
)
def test_spectrum_table(n, k, q, lams, mults):
    t = spectrum(n, k, q)
    assert t.eigenvalues == lams and t.multiplicities == mults
    assert sum(l * m for l, m in zip(lams, mults)) == 0


@pytest.mark.parametrize("n,k,q", [(4, 2, 2), (5, 2, 2), (6, 2, 2)])
def test_spectrum_against_float_eigensolver(n, k, q):
    # independent oracle: LAPACK eigenvalues of the built matrix, rounded
    M = qkneser_adjacency(grassmannian(n, k, q))
    ev = np.linalg.eigvalsh(M.dense().num.astype(float)) / q ** (k * k)
    t = spectrum(n, k, q)
    got = Counter()
    for x in ev:
        nearest = min(t.eigenvalues, key=lambda lam: abs(float(lam) - x))
        assert abs(float(nearest) - x) < 1e-8
        got[nearest] += 1
    assert tuple(got[lam] for lam in t.eigenvalues) == t.multiplicities


def test_spectrum_rejects_small_n():
    with pytest.raises(ValueError):
        spectrum(5, 3, 2)


def test_spectrum_report_over_budget():
    r = spectrum_report(7, 3, 2)
    assert r.passed and r.status == "formula-consistency only"
    assert r.details["multiplicities"] == [1, 126, 2540, 9144]


def test_projectors_small():
    P = projector_set(4, 2, 2)
    assert P.report.passed
    assert P[1].trace() == 14
    J = [[Fraction(1, 35)] * 35 for _ in range(35)]
    assert P[0].to_fractions() == J
    P5 = projector_set(5, 2, 2)
    total = P5[0] + P5[1] + P5[2]
    assert total.residual_witness(type(total).identity(155, total.rows)) is None


def test_projector_budget():
    with pytest.raises(OverBudget):
        projector_set(7, 3, 2)


def test_projection_examples():
    P = projector_set(4, 2, 2)
    ones = [1] * 35
    parts = project(ones, P)
    assert sqnorm(parts[0]) == 35 and sqnorm(parts[1]) == 0 and sqnorm(parts[2]) == 0
    e0 = [1] + [0] * 34
    assert sqnorm(project(e0, P)[0]) == Fraction(1, 35)


@settings(max_examples=15)
@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=35, max_size=35))
def test_projection_property(h):
    P = projector_set(4, 2, 2)
    r = projection_report(h, project(h, P))
    assert r.passed
    assert sum(r.details["sqnorms"]) == sum(x * x for x in h)


@settings(max_examples=20)
@given(st.lists(st.integers(0, 1), min_size=155, max_size=155))
def test_moment_route_agrees_with_projectors(h):
    n, k, q = 5, 2, 2
    P = projector_set(n, k, q)
    direct = [sqnorm(c) for c in project(h, P)]
    moments = []
    for i in range(k + 1):
        W = build_incidence(i, k, q, n)
        x = np.asarray(W.num @ np.array(h, dtype=np.int64)).ravel()
        moments.append(int((x.astype(object) ** 2).sum()))
    assert component_sqnorms_from_degrees(n, k, q, moments) == direct


def test_lemma24_examples():
    r = verify_lemma24(4, 2, 2, 1, 2, 2)
    assert r.passed
    W12, W23, W13 = build_incidence(1, 2, 2, 4), build_incidence(2, 3, 2, 4), build_incidence(1, 3, 2, 4)
    assert (W12 @ W23).residual_witness(W13.scaled(3)) is None
    r0 = verify_lemma24(4, 2, 2, 0, 0, 2)
    assert r0.passed and r0.details["parts"]["(iv) rank"]
    assert verify_lemma24(5, 2, 2, 2, 2, 2).passed


@pytest.mark.parametrize("n,k,q,i,j", [(5, 2, 2, 2, 1), (6, 3, 2, 3, 2), (4, 2, 2, 0, 0)])
def test_lemma25(n, k, q, i, j):
    assert verify_lemma25(n, k, q, i, j).passed


def test_lemma26_examples():
    assert lemma26_eigenvalue(4, 2, 0, 0, 2) == gauss_binom(4, 2, 2)
    assert lemma26_eigenvalue(4, 2, 1, 2, 2) == 0
    assert lemma26_eigenvalue(5, 2, 2, 1, 2) == 1
    for i in range(3):
        for j in range(3):
            assert verify_lemma26(4, 2, 2, i, j).passed


def test_lemma27():
    assert verify_lemma27(4, 2, 1, 2, [0] * 35).details["lhs"] == 0
    r = verify_lemma27(4, 2, 1, 2, [1] * 35)
    assert r.passed
    rng = random.Random(5)
    for _ in range(5):
        h = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(155)]
        assert verify_lemma27(5, 2, 1, 2, h).passed


def test_identity_tasks_cover_ranges():
    tasks = identity_tasks(5, 2, 2)
    assert sum(t[0] == "lemma24" for t in tasks) == 10
    assert sum(t[0] == "lemma26" for t in tasks) == 9
    assert ("lemma27", None, None, None, 1) in tasks


def test_kneser_eigenvalue_values():
    assert kneser_eigenvalue(5, 2, 0, 2) == 7
    assert kneser_eigenvalue(5, 2, 1, 3) == Fraction(-4, 9)
