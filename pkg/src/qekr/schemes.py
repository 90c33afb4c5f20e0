"""Incidence matrices of the subspace lattice, the q-Kneser spectrum and its
eigenprojectors, and instance checks of the matrix identities built on them.

Notation follows the usual one for the Grassmann scheme: ``W[i,j]`` is the
0/1 containment matrix between ``i``- and ``j``-subspaces, ``Wbar[i,j]`` the
trivial-intersection matrix, ``M = Wbar[k,k]`` the q-Kneser adjacency and
``A = q^{-k^2} M``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, prod
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .exact import ExactMatrix, rank_exact
from .gfq import FieldSpec
from .grassmann import DEFAULT_CAP, GrassmannIndex, grassmannian
from .qarith import gauss_binom
from .report import Report, timed

DENSE_BUDGET = 2_000


class EigenvalueCollision(ValueError):
    pass


class SpectralDefect(ArithmeticError):
    """A projector identity failed; the report carries the witness."""

    def __init__(self, report: Report):
        self.report = report
        super().__init__(f"{report.check} failed: {report.witness}")


def _q(F: FieldSpec | int) -> int:
    return F.q if isinstance(F, FieldSpec) else int(F)


def _grass(n: int, k: int, q: int, cap: int) -> GrassmannIndex:
    return grassmannian(n, k, q, cap=max(cap, DEFAULT_CAP))


# incidence matrices -----------------------------------------------------------


@lru_cache(maxsize=128)
def _incidence(i: int, j: int, q: int, n: int, cap: int) -> ExactMatrix:
    Gi, Gj = _grass(n, i, q, cap), _grass(n, j, q, cap)
    if i == 0:
        num = sp.csr_matrix(np.ones((1, len(Gj)), dtype=np.int64))
    else:
        shared = (Gi.point_incidence @ Gj.point_incidence.T).tocsr()
        shared.data = (shared.data == gauss_binom(i, 1, q)).astype(np.int64)
        shared.eliminate_zeros()
        num = shared
    return ExactMatrix(num, 1, Gi.tag, Gj.tag)


def build_incidence(i: int, j: int, F: FieldSpec | int, n: int, cap: int = DEFAULT_CAP) -> ExactMatrix:
    """``W[i,j]``: rows ``i``-subspaces, columns ``j``-subspaces, 1 iff ``S <= T``."""
    if not (0 <= i <= j <= n):
        raise ValueError(f"W[i,j] needs 0 <= i <= j <= n, got i={i} j={j} n={n}")
    return _incidence(i, j, _q(F), n, cap)


@lru_cache(maxsize=128)
def _disjointness(i: int, j: int, q: int, n: int, cap: int) -> ExactMatrix:
    Gi, Gj = _grass(n, i, q, cap), _grass(n, j, q, cap)
    if i == 0 or j == 0:
        num = np.ones((len(Gi), len(Gj)), dtype=np.int64)
    else:
        shared = (Gi.point_incidence @ Gj.point_incidence.T).toarray()
        num = (shared == 0).astype(np.int64)
    return ExactMatrix(num, 1, Gi.tag, Gj.tag)


def build_disjointness(i: int, j: int, F: FieldSpec | int, n: int, cap: int = DEFAULT_CAP) -> ExactMatrix:
    """``Wbar[i,j]``: 1 iff the ``i``-subspace and the ``j``-subspace meet in ``{0}``.

    Stored dense: almost every pair of small subspaces meets trivially.
    """
    if not (0 <= i <= n and 0 <= j <= n):
        raise ValueError(f"Wbar[i,j] needs 0 <= i, j <= n, got i={i} j={j} n={n}")
    return _disjointness(i, j, _q(F), n, cap)


def qkneser_adjacency(G: GrassmannIndex) -> ExactMatrix:
    """Integer adjacency ``M`` of the q-Kneser graph; ``A = M / q^{k^2}``."""
    M = build_disjointness(G.k, G.k, G.field, G.n, cap=len(G))
    return ExactMatrix(M.num, 1, M.rows, M.cols, meta={"scale_to_A": Fraction(1, G.q ** (G.k * G.k))})


# spectrum ---------------------------------------------------------------------


def kneser_eigenvalue(n: int, k: int, i: int, q: int) -> Fraction:
    return (-1) ** i * Fraction(q) ** (comb(i, 2) - k * i) * gauss_binom(n - k - i, k - i, q)


def multiplicity(n: int, i: int, q: int) -> int:
    return gauss_binom(n, i, q) - gauss_binom(n, i - 1, q)


@dataclass(frozen=True)
class SpectrumTable:
    n: int
    k: int
    q: int
    eigenvalues: tuple[Fraction, ...]
    multiplicities: tuple[int, ...]

    @property
    def scale(self) -> int:
        return self.q ** (self.k * self.k)

    @property
    def scaled(self) -> tuple[int, ...]:
        """Eigenvalues of the integer adjacency ``M = q^{k^2} A``."""
        out = []
        for lam in self.eigenvalues:
            mu = lam * self.scale
            if mu.denominator != 1:
                raise ArithmeticError(f"scaled eigenvalue {mu} is not an integer")
            out.append(mu.numerator)
        return tuple(out)

    def rows(self) -> list[tuple[int, Fraction, int]]:
        return [(i, lam, m) for i, (lam, m) in enumerate(zip(self.eigenvalues, self.multiplicities))]


def spectrum(n: int, k: int, q: int) -> SpectrumTable:
    """Eigenvalues and multiplicities of ``A`` from the closed forms.

    ``lambda_i = (-1)^i q^{C(i,2) - k i} [n-k-i k-i]`` with multiplicity
    ``[n i] - [n i-1]``. Checks that the multiplicities add up to ``[n k]``, the
    trace vanishes and the eigenvalues are pairwise distinct.
    """
    if n < 2 * k:
        raise ValueError(f"spectrum needs n >= 2k, got n={n} k={k}")
    lams = tuple(kneser_eigenvalue(n, k, i, q) for i in range(k + 1))
    mults = tuple(multiplicity(n, i, q) for i in range(k + 1))
    if len(set(lams)) != len(lams):
        raise EigenvalueCollision(f"coinciding eigenvalues at n={n} k={k} q={q}: {lams}")
    if sum(mults) != gauss_binom(n, k, q):
        raise ArithmeticError("multiplicities do not add up to [n k]")
    if sum(m * lam for m, lam in zip(mults, lams)) != 0:
        raise ArithmeticError("sum of m_i lambda_i is not zero")
    table = SpectrumTable(n, k, q, lams, mults)
    table.scaled  # integrality check
    return table


def spectrum_report(n: int, k: int, q: int, dense_budget: int = DENSE_BUDGET) -> Report:
    """Formula table plus, within the dense budget, the full projector check."""
    report = Report("spectrum", {"n": n, "k": k, "q": q})
    with timed(report):
        table = spectrum(n, k, q)
        report.details = {
            "eigenvalues": list(table.eigenvalues),
            "scaled_eigenvalues": list(table.scaled),
            "multiplicities": list(table.multiplicities),
            "trace_zero": True,
        }
        size = gauss_binom(n, k, q)
        if size > dense_budget:
            report.status = "formula-consistency only"
            report.notes.append(f"[n k] = {size} exceeds dense budget {dense_budget}; matrix not built")
            return report
        P = projector_set(n, k, q, dense_budget)
        report.details["projector_checks"] = P.report.details
        report.residual_zero = P.report.residual_zero
        if not P.report.passed:
            report.fail(P.report.witness)
    return report


# projectors -------------------------------------------------------------------


def _poly_from_roots(roots: Sequence[int]) -> list[int]:
    """Integer coefficients (constant first) of ``prod (x - r)``."""
    c = [1]
    for r in roots:
        nxt = [0] * (len(c) + 1)
        for t, a in enumerate(c):
            nxt[t + 1] += a
            nxt[t] -= r * a
        c = nxt
    return c


@dataclass
class ProjectorSet:
    """Orthogonal projectors ``P_0..P_k`` onto the eigenspaces of ``A``."""

    spectrum: SpectrumTable
    projectors: list[ExactMatrix]
    report: Report = field(repr=False)

    def __len__(self) -> int:
        return len(self.projectors)

    def __getitem__(self, i: int) -> ExactMatrix:
        return self.projectors[i]


def eigenprojectors(M: ExactMatrix, table: SpectrumTable, verify: bool = True) -> ProjectorSet:
    """``P_i = prod_{j != i} (M - mu_j I) / (mu_i - mu_j)`` for the integer-scaled ``M``.

    With ``verify`` the full set of projector identities is checked exactly;
    any failure raises :class:`SpectralDefect`.
    """
    mus = table.scaled
    N = M.shape[0]
    if N != gauss_binom(table.n, table.k, table.q):
        raise ValueError("matrix size does not match the spectrum table")
    Md = M.dense()
    powers = [ExactMatrix.identity(N, M.rows).dense(), Md]
    for _ in range(2, len(mus)):
        powers.append(powers[-1] @ Md)
    projectors = []
    for i, mu in enumerate(mus):
        others = [m for j, m in enumerate(mus) if j != i]
        coeffs = _poly_from_roots(others)
        den = prod(mu - m for m in others)
        acc = powers[0].scaled(0).dense()
        for t, c in enumerate(coeffs):
            if c:
                acc = acc + powers[t].scaled(c)
        projectors.append(acc.scaled(Fraction(1, den)).dense())
    report = Report("eigenprojectors", {"n": table.n, "k": table.k, "q": table.q})
    pset = ProjectorSet(table, projectors, report)
    if verify:
        with timed(report):
            _verify_projectors(pset, Md)
        if not report.passed:
            raise SpectralDefect(report)
    return pset


def _verify_projectors(P: ProjectorSet, M: ExactMatrix) -> None:
    report = P.report
    table = P.spectrum
    N = M.shape[0]
    I = ExactMatrix.identity(N, M.rows)
    checks: dict[str, bool] = {}

    def record(name: str, w: dict | None) -> None:
        checks[name] = w is None
        if w is not None:
            report.fail({"identity": name, **w})

    total = P[0]
    for Pi in P.projectors[1:]:
        total = total + Pi
    record("sum_is_identity", total.residual_witness(I))
    recon = P[0].scaled(table.scaled[0])
    for mu, Pi in zip(table.scaled[1:], P.projectors[1:]):
        recon = recon + Pi.scaled(mu)
    record("spectral_reconstruction", recon.residual_witness(M))
    J = ExactMatrix(np.ones((N, N), dtype=np.int64), N, M.rows, M.cols).compact()
    record("P0_is_J_over_size", P[0].residual_witness(J))
    traces = []
    for i, Pi in enumerate(P.projectors):
        record(f"P{i}_symmetric", Pi.residual_witness(Pi.T))
        tr = Pi.trace()
        traces.append(tr)
        if tr != table.multiplicities[i]:
            report.fail({"identity": f"trace(P{i})", "trace": tr, "multiplicity": table.multiplicities[i]})
        checks[f"trace_P{i}_is_multiplicity"] = tr == table.multiplicities[i]
    for i, Pi in enumerate(P.projectors):
        for j in range(i, len(P)):
            prod_ij = Pi @ P[j]
            if i == j:
                record(f"P{i}_idempotent", prod_ij.residual_witness(Pi))
            else:
                w = prod_ij.first_nonzero()
                record(f"P{i}P{j}_zero", None if w is None else {"row": w[0], "col": w[1], "value": prod_ij.entry(*w)})
    report.residual_zero = all(checks.values())
    report.details = {"checks": checks, "traces": traces, "multiplicities": list(table.multiplicities)}


class OverBudget(ValueError):
    pass


def projector_set(n: int, k: int, q: int, dense_budget: int = DENSE_BUDGET) -> ProjectorSet:
    """Verified eigenprojectors for ``(n, k, q)``, memoized per process."""
    size = gauss_binom(n, k, q)
    if size > dense_budget:
        raise OverBudget(f"[{n} {k}]_{q} = {size} exceeds the dense budget {dense_budget}")
    return _projector_set(n, k, q)


@lru_cache(maxsize=8)
def _projector_set(n: int, k: int, q: int) -> ProjectorSet:
    G = grassmannian(n, k, q)
    return eigenprojectors(qkneser_adjacency(G), spectrum(n, k, q))


# vectors ----------------------------------------------------------------------


def project(h: Sequence, P: ProjectorSet) -> list[ExactMatrix]:
    """Components ``h_i = P_i h`` (column vectors) of ``h``."""
    if len(h) != P[0].shape[0]:
        raise ValueError(f"vector of length {len(h)} does not match projectors of size {P[0].shape[0]}")
    v = ExactMatrix.column(h, P[0].cols)
    return [Pi @ v for Pi in P.projectors]


def inner(u: ExactMatrix, v: ExactMatrix) -> Fraction:
    return (u.T @ v).entry(0, 0)


def sqnorm(v: ExactMatrix) -> Fraction:
    return inner(v, v)


def projection_report(h: Sequence, parts: list[ExactMatrix]) -> Report:
    """Check ``sum h_i = h``, pairwise orthogonality and the Pythagoras identity."""
    report = Report("projection", {"length": len(h), "components": len(parts)})
    v = ExactMatrix.column(h, parts[0].rows)
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    report.require(total.equals(v), "components sum to h")
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            ip = inner(parts[i], parts[j])
            report.require(ip == 0, "orthogonality", i=i, j=j, inner=ip)
    norms = [sqnorm(p) for p in parts]
    report.require(sqnorm(v) == sum(norms), "Pythagoras", norm=sqnorm(v), parts=sum(norms))
    report.residual_zero = report.passed
    report.details = {"sqnorms": norms}
    return report


def component_sqnorms_from_degrees(n: int, k: int, q: int, moments: Sequence[int | Fraction]) -> list[Fraction]:
    """Recover ``||h_j||^2`` for ``j = 0..k`` from ``moments[i] = ||W[i,k] h||^2``.

    ``W[i,k]^T W[i,k]`` acts on the ``j``-th eigenspace as
    ``q^{j(k-i)} [k-j k-i] [n-i-j k-i]`` for ``j <= i`` and as 0 for ``j > i``,
    so the moments form a lower-triangular system. No dense matrix is needed,
    which makes this usable where projectors are out of budget.
    """
    if len(moments) != k + 1:
        raise ValueError("need moments for i = 0..k")
    out: list[Fraction] = []
    for i in range(k + 1):
        acc = Fraction(moments[i])
        for j in range(i):
            acc -= lemma26_eigenvalue(n, k, i, j, q) * out[j]
        out.append(acc / lemma26_eigenvalue(n, k, i, i, q))
    return out


# identity checks --------------------------------------------------------------


def _record(report: Report, name: str, lhs: ExactMatrix, rhs: ExactMatrix, parts: dict) -> None:
    w = lhs.residual_witness(rhs)
    parts[name] = w is None
    if w is not None:
        report.fail({"identity": name, **w})


def verify_lemma24(n: int, k: int, q: int, i: int, j: int, r: int, dense_budget: int = DENSE_BUDGET) -> Report:
    """Incidence identities (i)-(iv) between containment and disjointness matrices."""
    report = Report("lemma24", {"n": n, "k": k, "q": q, "i": i, "j": j, "r": r})
    with timed(report):
        if not (0 <= i <= j <= r <= k <= n):
            raise ValueError(f"need 0 <= i <= j <= r <= k <= n, got {report.params}")
        parts: dict[str, bool] = {}
        W = lambda a, b: build_incidence(a, b, q, n)  # noqa: E731
        Wb = lambda a, b: build_disjointness(a, b, q, n)  # noqa: E731

        rhs = None
        for m in range(i + 1):
            term = (W(m, i).T @ W(m, j)).scaled((-1) ** m * q ** comb(m, 2))
            rhs = term if rhs is None else rhs + term
        _record(report, "(i)", Wb(i, j), rhs, parts)

        rhs = None
        for m in range(i + 1):
            coef = (-1) ** m * Fraction(q) ** (comb(m + 1, 2) - m * i)
            term = (W(m, i).T @ Wb(m, j)).scaled(coef)
            rhs = term if rhs is None else rhs + term
        _record(report, "(ii)", W(i, j), rhs, parts)

        _record(report, "(iii)", W(i, j) @ W(j, r), W(i, r).scaled(gauss_binom(r - i, j - i, q)), parts)

        Wik = W(i, k)
        rk, method = rank_exact(Wik)
        parts["(iv) rank"] = rk == gauss_binom(n, i, q)
        report.require(parts["(iv) rank"], "(iv) rank", rank=rk, expected=gauss_binom(n, i, q))
        report.details["rank_method"] = method
        if n >= 2 * k and gauss_binom(n, k, q) <= dense_budget:
            P = projector_set(n, k, q, dense_budget)
            for m in range(i + 1, k + 1):
                prod_ = Wik @ P[m]
                w = prod_.first_nonzero()
                parts[f"(iv) W P{m} = 0"] = w is None
                if w is not None:
                    report.fail({"identity": f"(iv) W[{i},{k}] P{m}", "row": w[0], "col": w[1]})
        else:
            report.notes.append("(iv) projector annihilation skipped: outside dense budget or n < 2k")
        report.residual_zero = all(parts.values())
        report.details["parts"] = parts
    return report


def verify_lemma25(n: int, k: int, q: int, i: int, j: int) -> Report:
    """``W[i,k] W[j,k]^T = sum_m q^{m(k+m-i-j)} [n-i-j n-k-m] W[m,i]^T W[m,j]``."""
    report = Report("lemma25", {"n": n, "k": k, "q": q, "i": i, "j": j})
    with timed(report):
        if not (0 <= j <= i <= k < n):
            raise ValueError(f"need 0 <= j <= i <= k < n, got {report.params}")
        W = lambda a, b: build_incidence(a, b, q, n)  # noqa: E731
        lhs = W(i, k) @ W(j, k).T
        rhs = None
        for m in range(j + 1):
            coef = Fraction(q) ** (m * (k + m - i - j)) * gauss_binom(n - i - j, n - k - m, q)
            term = (W(m, i).T @ W(m, j)).scaled(coef)
            rhs = term if rhs is None else rhs + term
        w = lhs.residual_witness(rhs)
        report.residual_zero = w is None
        if w is not None:
            report.fail(w)
    return report


def lemma26_eigenvalue(n: int, k: int, i: int, j: int, q: int) -> int:
    """Eigenvalue of ``W[i,k]^T W[i,k]`` on the ``j``-th eigenspace."""
    if i < j:
        return 0
    return q ** (j * (k - i)) * gauss_binom(k - j, k - i, q) * gauss_binom(n - i - j, k - i, q)


def verify_lemma26(n: int, k: int, q: int, i: int, j: int, dense_budget: int = DENSE_BUDGET) -> Report:
    """``W[i,k]^T W[i,k] P_j = c P_j`` with ``c`` from :func:`lemma26_eigenvalue`."""
    report = Report("lemma26", {"n": n, "k": k, "q": q, "i": i, "j": j})
    with timed(report):
        if not (0 <= i <= k and 0 <= j <= k):
            raise ValueError(f"need 0 <= i, j <= k, got {report.params}")
        P = projector_set(n, k, q, dense_budget)
        Wik = build_incidence(i, k, q, n)
        c = lemma26_eigenvalue(n, k, i, j, q)
        lhs = Wik.T @ (Wik @ P[j])
        w = lhs.residual_witness(P[j].scaled(c))
        report.residual_zero = w is None
        report.details = {"eigenvalue": c, "vanishing_case": i < j}
        if w is not None:
            report.fail(w)
    return report


def lemma27_coefficient(n: int, k: int, d: int, r: int, q: int) -> Fraction:
    return (
        (-1) ** r
        * Fraction(q) ** (k * r + (d - r) ** 2 - comb(r + 1, 2))
        * gauss_binom(k - r, d - r, q)
        * gauss_binom(n - d - r, d - r, q)
        * gauss_binom(n - d - r, k - d, q)
    )


def verify_lemma27(n: int, k: int, d: int, q: int, h: Sequence, dense_budget: int = DENSE_BUDGET) -> Report:
    """Quadratic form of ``Wbar[d,d]`` on ``W[d,k] h`` against the spectral sum.

    Valid for arbitrary ``h``. Also checks the vector-free matrix identity
    ``W[d,k]^T Wbar[d,d] W[d,k] = sum_i (-1)^i q^C(i,2) [k-i d-i]^2 W[i,k]^T W[i,k]``.
    """
    report = Report("lemma27", {"n": n, "k": k, "d": d, "q": q})
    with timed(report):
        if not (k > d >= 1 and n >= 2 * k):
            raise ValueError(f"need k > d >= 1 and n >= 2k, got {report.params}")
        Wdk = build_incidence(d, k, q, n)
        Wbdd = build_disjointness(d, d, q, n)
        lhs_mat = Wdk.T @ Wbdd @ Wdk
        rhs_mat = None
        for i in range(d + 1):
            Wik = build_incidence(i, k, q, n)
            term = (Wik.T @ Wik).scaled((-1) ** i * q ** comb(i, 2) * gauss_binom(k - i, d - i, q) ** 2)
            rhs_mat = term if rhs_mat is None else rhs_mat + term
        wm = lhs_mat.residual_witness(rhs_mat)
        if wm is not None:
            report.fail({"identity": "matrix", **wm})

        v = ExactMatrix.column(h, Wdk.cols)
        x = Wdk @ v
        lhs = (x.T @ Wbdd @ x).entry(0, 0)
        P = projector_set(n, k, q, dense_budget)
        norms = [sqnorm(c) for c in project(h, P)]
        rhs = sum((lemma27_coefficient(n, k, d, r, q) * norms[r] for r in range(d + 1)), Fraction(0))
        if lhs != rhs:
            report.fail({"identity": "quadratic form", "lhs": lhs, "rhs": rhs})
        report.residual_zero = wm is None and lhs == rhs
        report.details = {"lhs": lhs, "rhs": rhs, "sqnorms": norms}
    return report


# suites -----------------------------------------------------------------------


def identity_tasks(n: int, k: int, q: int) -> list[tuple]:
    """Every admissible instance of the incidence and spectral identities at ``(n, k, q)``.

    Tuples are ``(check, i, j, r, d)`` with unused slots ``None``.
    """
    tasks: list[tuple] = []
    for i in range(k + 1):
        for j in range(i, k + 1):
            for r in range(j, k + 1):
                tasks.append(("lemma24", i, j, r, None))
    if k < n:
        for i in range(k + 1):
            for j in range(i + 1):
                tasks.append(("lemma25", i, j, None, None))
    if n >= 2 * k:
        for i in range(k + 1):
            for j in range(k + 1):
                tasks.append(("lemma26", i, j, None, None))
        for d in range(1, k):
            tasks.append(("lemma27", None, None, None, d))
    return tasks


def lemma27_vectors(n: int, k: int, q: int, seed: int = 0) -> dict[str, list]:
    """Test vectors for the quadratic-form identity: the empty and pencil
    indicators plus a seeded random rational vector."""
    G = grassmannian(n, k, q)
    size = len(G)
    pencil = G.point_incidence[:, 0].toarray().ravel().astype(int).tolist()
    rng = random.Random(seed)
    rational = [Fraction(rng.randint(-9, 9), rng.randint(1, 6)) for _ in range(size)]
    return {"empty": [0] * size, "pencil": pencil, f"random-rational(seed={seed})": rational}


def identity_suite(n: int, k: int, q: int, seed: int = 0, dense_budget: int = DENSE_BUDGET) -> list[Report]:
    """Run :func:`identity_tasks` at ``(n, k, q)``; raises :class:`OverBudget` when
    the spectral identities would need projectors beyond ``dense_budget``."""
    if n >= 2 * k and gauss_binom(n, k, q) > dense_budget:
        raise OverBudget(f"[{n} {k}]_{q} = {gauss_binom(n, k, q)} exceeds the dense budget {dense_budget}")
    reports = []
    vectors = lemma27_vectors(n, k, q, seed) if n >= 2 * k and k >= 2 else {}
    for name, i, j, r, d in identity_tasks(n, k, q):
        if name == "lemma24":
            reports.append(verify_lemma24(n, k, q, i, j, r, dense_budget))
        elif name == "lemma25":
            reports.append(verify_lemma25(n, k, q, i, j))
        elif name == "lemma26":
            reports.append(verify_lemma26(n, k, q, i, j, dense_budget))
        else:
            for label, h in vectors.items():
                rep = verify_lemma27(n, k, d, q, h, dense_budget)
                rep.params["vector"] = label
                reports.append(rep)
    return reports
