"""Intersecting families of k-subspaces: construction, degrees, file I/O and
certificates for the degree and size bounds."""

from __future__ import annotations

import json
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Any

import numpy as np

from . import proofchain
from .exact import ExactMatrix
from .gfq import MODULI, make_field
from .grassmann import (
    DEFAULT_CAP,
    GrassmannIndex,
    Subspace,
    grassmannian,
    is_rref,
    rref_canonical,
)
from .qarith import gauss_binom
from .report import Report, jsonable, timed
from .schemes import (
    DENSE_BUDGET,
    build_disjointness,
    build_incidence,
    component_sqnorms_from_degrees,
    kneser_eigenvalue,
    project,
    projector_set,
    sqnorm,
)

FAMILY_FORMAT = "qekr-family"
FAMILY_FORMAT_VERSION = 1


class NotIntersecting(ValueError):
    pass


class FamilyFileError(ValueError):
    """Malformed or incompatible family file."""


class FamilyFileWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Family:
    """A set of members of one Grassmannian, held as sorted positions."""

    grassmann: GrassmannIndex
    members: tuple[int, ...]
    provenance: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        m = tuple(sorted(set(int(i) for i in self.members)))
        if m != tuple(self.members):
            raise ValueError("members must be sorted and duplicate-free")
        if m and not (0 <= m[0] and m[-1] < len(self.grassmann)):
            raise ValueError("member index out of range")

    @classmethod
    def of(cls, G: GrassmannIndex, members, provenance: dict | None = None) -> Family:
        return cls(G, tuple(sorted(set(int(i) for i in members))), dict(provenance or {}))

    @property
    def n(self) -> int:
        return self.grassmann.n

    @property
    def k(self) -> int:
        return self.grassmann.k

    @property
    def q(self) -> int:
        return self.grassmann.q

    def __len__(self) -> int:
        return len(self.members)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Family):
            return NotImplemented
        return (
            self.grassmann.tag == other.grassmann.tag
            and self.members == other.members
            and self.provenance == other.provenance
        )

    def subspaces(self) -> list[Subspace]:
        return [self.grassmann[i] for i in self.members]

    def indicator(self) -> list[int]:
        h = [0] * len(self.grassmann)
        for i in self.members:
            h[i] = 1
        return h

    def with_member(self, idx: int) -> Family:
        return Family.of(self.grassmann, set(self.members) | {idx}, self.provenance)


# construction -----------------------------------------------------------------


def canonical_pencil(G: GrassmannIndex, E: Subspace) -> Family:
    """All members of ``G`` containing the 1-space ``E``."""
    if E.dim != 1:
        raise ValueError(f"pencil needs a 1-dimensional subspace, got dim {E.dim}")
    if E.n != G.n or E.field != G.field:
        raise ValueError("E is not a subspace of the Grassmannian's ambient space")
    if G.k == 0:
        return Family.of(G, [], {"kind": "pencil", "point": list(E.basis[0])})
    p = grassmannian(G.n, 1, G.q).position(E)
    col = G.point_incidence[:, p].toarray().ravel()
    members = np.flatnonzero(col).tolist()
    return Family.of(G, members, {"kind": "pencil", "point": list(E.basis[0])})


def _shared_points(G: GrassmannIndex, rows, cols) -> np.ndarray:
    I = G.point_incidence
    return (I[rows] @ I[cols].T).toarray()


def is_intersecting(F: Family) -> tuple[bool, tuple[Subspace, Subspace] | None]:
    """Every two members meet nontrivially; else one disjoint pair as witness."""
    if len(F) < 2:
        return True, None
    shared = _shared_points(F.grassmann, list(F.members), list(F.members))
    bad = np.argwhere(shared == 0)
    if len(bad) == 0:
        return True, None
    a, b = (int(x) for x in bad[0])
    return False, (F.grassmann[F.members[a]], F.grassmann[F.members[b]])


def random_intersecting(G: GrassmannIndex, seed: int, target: int) -> Family:
    """Greedy intersecting family.

    Positions are shuffled with ``random.Random(seed).shuffle``; a subspace is
    taken whenever it meets every member taken so far. Stops at ``target``
    members or when the order is exhausted.
    """
    if target < 1:
        raise ValueError("target must be >= 1")
    order = list(range(len(G)))
    random.Random(seed).shuffle(order)
    I = G.point_incidence.tocsr()
    alive = np.ones(len(G), dtype=bool)
    members: list[int] = []
    for idx in order:
        if len(members) >= target:
            break
        if not alive[idx]:
            continue
        members.append(idx)
        alive &= (I @ I[idx].T).toarray().ravel() > 0
    return Family.of(G, members, {"kind": "random", "seed": seed, "target": target})


# degrees ----------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeProfile:
    d: int
    grassmann_d: GrassmannIndex = field(repr=False)
    degrees: tuple[int, ...] = field(repr=False)
    delta: int
    argmin: int

    def degree(self, S: Subspace) -> int:
        return self.degrees[self.grassmann_d.position(S)]

    @property
    def witness(self) -> Subspace:
        return self.grassmann_d[self.argmin]


def degree_vector(F: Family, d: int, Gd: GrassmannIndex | None = None) -> np.ndarray:
    Gd = grassmannian(F.n, d, F.q) if Gd is None else Gd
    if d == 0:
        return np.array([len(F)], dtype=np.int64)
    if not F.members:
        return np.zeros(len(Gd), dtype=np.int64)
    shared = (Gd.point_incidence @ F.grassmann.point_incidence[list(F.members)].T).toarray()
    return (shared == gauss_binom(d, 1, F.q)).sum(axis=1).astype(np.int64)


def degree_profile(F: Family, d: int, Gd: GrassmannIndex | None = None) -> DegreeProfile:
    """``d_S(F)`` for every ``d``-subspace ``S`` (including degree 0) and the minimum."""
    if not (1 <= d <= F.k):
        raise ValueError(f"need 1 <= d <= k, got d={d} k={F.k}")
    Gd = grassmannian(F.n, d, F.q) if Gd is None else Gd
    if (Gd.n, Gd.k, Gd.field) != (F.n, d, F.grassmann.field):
        raise ValueError("d-Grassmannian does not match the family")
    deg = degree_vector(F, d, Gd)
    total = int(deg.sum())
    if total != gauss_binom(F.k, d, F.q) * len(F):
        raise ArithmeticError(f"double count mismatch: sum d_S = {total}, [k d]|F| = {gauss_binom(F.k, d, F.q) * len(F)}")
    argmin = int(np.argmin(deg))
    return DegreeProfile(d, Gd, tuple(int(x) for x in deg), int(deg[argmin]), argmin)


# bounds -----------------------------------------------------------------------


def _require_intersecting(F: Family) -> None:
    ok, pair = is_intersecting(F)
    if not ok:
        raise NotIntersecting(f"family is not intersecting: {pair[0]!r} and {pair[1]!r} meet trivially")


def check_bounds(F: Family, d: int) -> Report:
    """Certify the minimum-degree and size bounds for an intersecting family.

    ``delta_d <= [n-d-1 k-d-1]`` (``k > d >= 2``), ``delta_1 <= [n-2 k-2]`` and
    ``|F| <= [n-1 k-1]``, all for ``n >= 2k+1``. Bounds whose range does not
    cover the instance are still evaluated and marked not applicable. A
    violation inside its range would refute a published theorem and is flagged
    ``COUNTEREXAMPLE`` together with the whole family.
    """
    n, k, q = F.n, F.k, F.q
    report = Report("bounds", {"n": n, "k": k, "q": q, "d": d, "size": len(F)})
    with timed(report):
        _require_intersecting(F)
        main = n >= 2 * k + 1
        bounds = {}
        prof_d = degree_profile(F, d)
        bounds["delta_d"] = {
            "value": prof_d.delta,
            "bound": gauss_binom(n - d - 1, k - d - 1, q),
            "applicable": main and k > d >= 2,
        }
        if k >= 1:
            prof_1 = prof_d if d == 1 else degree_profile(F, 1)
            bounds["delta_1"] = {"value": prof_1.delta, "bound": gauss_binom(n - 2, k - 2, q), "applicable": main}
        bounds["size"] = {"value": len(F), "bound": gauss_binom(n - 1, k - 1, q), "applicable": main}
        for name, b in bounds.items():
            b["slack"] = b["bound"] - b["value"]
            if b["applicable"] and b["slack"] < 0:
                report.fail({"bound": name, **b, "family": family_to_dict(F)}, status="COUNTEREXAMPLE")
                report.notes.append(f"{name} exceeds a proven bound: maximal severity")
        report.details = {"bounds": bounds, "argmin_subspace": [list(r) for r in prof_d.witness.basis]}
    return report


# spectral quantities of a family ----------------------------------------------


def component_sqnorms(F: Family, dense_budget: int = DENSE_BUDGET) -> tuple[list[Fraction], str]:
    """``||h_i||^2`` for ``i = 0..k`` of the indicator ``h`` of ``F``.

    Uses the verified projectors when ``[n k]`` fits the dense budget, else the
    degree moments ``||W[i,k] h||^2 = sum_S d_S(F)^2``.
    """
    n, k, q = F.n, F.k, F.q
    if gauss_binom(n, k, q) <= dense_budget:
        P = projector_set(n, k, q, dense_budget)
        return [sqnorm(c) for c in project(F.indicator(), P)], "projectors"
    return sqnorms_from_moments(F), "degree moments"


def sqnorms_from_moments(F: Family) -> list[Fraction]:
    moments = [int((degree_vector(F, i).astype(object) ** 2).sum()) for i in range(F.k + 1)]
    return component_sqnorms_from_degrees(F.n, F.k, F.q, moments)


def disjoint_pairs_inside(F: Family) -> int:
    """Ordered pairs of members meeting trivially, i.e. ``h^T M h``."""
    if not F.members:
        return 0
    shared = _shared_points(F.grassmann, list(F.members), list(F.members))
    return int((shared == 0).sum())


def hoffman_check(F: Family, d: int, dense_budget: int = DENSE_BUDGET) -> Report:
    """Spectral inequality for an intersecting family.

    Evaluates ``-c|F| + sum_{i<=d} (c + lambda_i) ||h_i||^2`` and requires it to
    be strictly negative, alongside the exact facts it rests on:
    ``h^T A h = 0``, ``sum lambda_i ||h_i||^2 = 0``, ``sum ||h_i||^2 = |F|`` and
    ``||h_0||^2 = |F|^2 / [n k]``. The quantity equals
    ``-sum_{i>d} (c + lambda_i) ||h_i||^2``, so it is zero exactly when ``h``
    has no weight above ``d``; the report exposes that tail weight.
    """
    n, k, q = F.n, F.k, F.q
    report = Report("hoffman", {"n": n, "k": k, "q": q, "d": d, "size": len(F)})
    with timed(report):
        _require_intersecting(F)
        if not (k > d >= 1):
            raise ValueError(f"need k > d >= 1, got k={k} d={d}")
        in_range = n >= 2 * k + 1
        norms, method = component_sqnorms(F, dense_budget)
        lams = [kneser_eigenvalue(n, k, i, q) for i in range(k + 1)]
        c = proofchain.hoffman_constant(n, k, d, q)
        size = len(F)
        hAh = Fraction(disjoint_pairs_inside(F), q ** (k * k))
        spectral = sum((lam * x for lam, x in zip(lams, norms)), Fraction(0))
        quantity = -c * size + sum(((c + lams[i]) * norms[i] for i in range(d + 1)), Fraction(0))
        tail = sum(norms[d + 1 :], Fraction(0))
        report.require(hAh == 0, "h^T A h = 0", value=hAh)
        report.require(spectral == 0, "sum lambda_i ||h_i||^2 = 0", value=spectral)
        report.require(sum(norms) == size, "sum ||h_i||^2 = |F|", value=sum(norms))
        report.require(norms[0] == Fraction(size * size, gauss_binom(n, k, q)), "||h_0||^2 = |F|^2/[n k]", value=norms[0])
        tail_form = -sum(((c + lams[i]) * norms[i] for i in range(d + 1, k + 1)), Fraction(0))
        report.require(quantity == tail_form, "quantity equals minus weighted tail", value=quantity, tail_form=tail_form)
        report.residual_zero = report.passed
        report.details = {
            "quantity": quantity,
            "sign": (quantity > 0) - (quantity < 0),
            "c": c,
            "eigenvalues": lams,
            "sqnorms": norms,
            "tail_weight": tail,
            "norm_method": method,
        }
        if not in_range:
            report.status = "range-extrapolation"
            report.notes.append("n < 2k+1: strict sign recorded, not required")
        elif report.passed and not quantity < 0:
            report.fail({"failed": "quantity < 0", "quantity": quantity, "tail_weight": tail}, status="not-strict")
            report.notes.append("quantity is 0 because h has no weight above d (e.g. a full pencil)")
    return report


def check_e106(F: Family, d: int) -> Report:
    """Double sum over disjoint ordered pairs of ``d``-subspaces versus the
    quadratic form ``(W[d,k] h)^T Wbar[d,d] (W[d,k] h)``."""
    n, k, q = F.n, F.k, F.q
    report = Report("e106", {"n": n, "k": k, "q": q, "d": d, "size": len(F)})
    with timed(report):
        Gd = grassmannian(n, d, q)
        prof = degree_profile(F, d, Gd)
        # scan: point sets from enumerating each subspace's vectors
        nz = [s for s, x in enumerate(prof.degrees) if x]
        masks = {s: _point_mask(Gd[s]) for s in nz}
        scan = 0
        for s in nz:
            for t in nz:
                if not masks[s] & masks[t]:
                    scan += prof.degrees[s] * prof.degrees[t]
        Wdk = build_incidence(d, k, q, n)
        x = Wdk @ ExactMatrix.column(F.indicator(), Wdk.cols)
        form = (x.T @ build_disjointness(d, d, q, n) @ x).entry(0, 0)
        report.residual_zero = scan == form
        report.require(scan == form, "pair scan vs quadratic form", scan=scan, form=form)
        report.details = {"lhs": scan, "rhs": form}
    return report


def _point_mask(S: Subspace) -> int:
    mask = 0
    q = S.q
    for v in S.vectors():
        nz = np.flatnonzero(v)
        if len(nz) == 0:
            continue
        # scale so the first nonzero entry is 1, then encode base q
        s = S.field.inverse(int(v[nz[0]]))
        w = S.field.mul[s, v]
        mask |= 1 << int(sum(int(x) * q**j for j, x in enumerate(w)))
    return mask


def lemma32_quantities(F: Family, d: int, dense_budget: int = DENSE_BUDGET) -> Report:
    """``Q = sum_{i<=d} b_i ||h_i||^2 - f|F| + g`` and its combinatorial meaning.

    ``Q`` equals ``sum over disjoint ordered (S, T) of (d_S - B)(d_T - B)`` with
    ``B = [n-d-1 k-d-1]``; both sides are computed. When ``delta_d > B`` the
    hypothesis of the degree argument holds and ``Q > 0`` is required; such a
    family would itself contradict the degree bound.
    """
    n, k, q = F.n, F.k, F.q
    report = Report("lemma32", {"n": n, "k": k, "q": q, "d": d, "size": len(F)})
    with timed(report):
        if not (k > d >= 1 and n >= 2 * k):
            raise ValueError(f"need k > d >= 1 and n >= 2k, got n={n} k={k} d={d}")
        cs = proofchain.coefficients(n, k, d, q)
        norms, method = component_sqnorms(F, dense_budget)
        Q = sum((cs.b[i] * norms[i] for i in range(d + 1)), Fraction(0)) - cs.f * len(F) + cs.g
        B = gauss_binom(n - d - 1, k - d - 1, q)
        prof = degree_profile(F, d)
        x = np.array(prof.degrees, dtype=np.int64) - B
        Gd = grassmannian(n, d, q)
        disjoint = ((Gd.point_incidence @ Gd.point_incidence.T).toarray() == 0).astype(np.int64)
        direct = int(x.astype(object) @ (disjoint @ x).astype(object))
        report.residual_zero = Q == direct
        report.require(Q == direct, "Q equals centered pair sum", Q=Q, direct=direct)
        hypothesis = prof.delta > B
        if not (k > d >= 2 and n >= 2 * k + 1):
            report.notes.append("range-extrapolation")
        if hypothesis:
            report.status = "hypothesis-met"
            report.notes.append("delta_d exceeds the bound: contradicts the degree theorem, maximal severity")
            report.require(Q > 0, "Q > 0", Q=Q)
            report.fail({"failed": "degree bound violated", "delta": prof.delta, "bound": B,
                         "family": family_to_dict(F)}, status="COUNTEREXAMPLE")
        else:
            report.status = "hypothesis-not-met" if report.passed else report.status
        report.details = {"Q": Q, "direct": direct, "delta": prof.delta, "bound": B, "norm_method": method,
                          "g": cs.g}
    return report


# file I/O ---------------------------------------------------------------------


def family_to_dict(F: Family) -> dict[str, Any]:
    return {
        "format": FAMILY_FORMAT,
        "format_version": FAMILY_FORMAT_VERSION,
        "n": F.n,
        "k": F.k,
        "q": F.q,
        "modulus": list(MODULI.get(F.q, ())),
        "provenance": jsonable(F.provenance),
        "members": [[list(r) for r in F.grassmann[i].basis] for i in F.members],
    }


def save_family(F: Family, path: str | Path) -> None:
    Path(path).write_text(json.dumps(family_to_dict(F), sort_keys=True, indent=1) + "\n", encoding="utf-8")


def family_from_dict(data: Any, cap: int = DEFAULT_CAP) -> Family:
    if not isinstance(data, dict):
        raise FamilyFileError("family file must hold a JSON object")
    for key in ("format", "format_version", "n", "k", "q", "modulus", "members"):
        if key not in data:
            raise FamilyFileError(f"missing field {key!r}")
    if data["format"] != FAMILY_FORMAT:
        raise FamilyFileError(f"unknown format {data['format']!r}")
    if data["format_version"] != FAMILY_FORMAT_VERSION:
        raise FamilyFileError(f"unsupported format_version {data['format_version']!r}")
    n, k, q = data["n"], data["k"], data["q"]
    if not all(isinstance(x, int) and not isinstance(x, bool) for x in (n, k, q)) or not 0 <= k <= n:
        raise FamilyFileError("n, k, q must be integers with 0 <= k <= n")
    try:
        Fq = make_field(q)
    except ValueError as exc:
        raise FamilyFileError(str(exc)) from exc
    if list(data["modulus"]) != list(MODULI.get(q, ())):
        raise FamilyFileError(f"modulus {data['modulus']} does not match GF({q}) modulus {list(MODULI.get(q, ()))}")
    if not isinstance(data["members"], list):
        raise FamilyFileError("members must be a list")
    G = grassmannian(n, k, q, cap=cap)
    positions = []
    for idx, rows in enumerate(data["members"]):
        if not isinstance(rows, list) or any(not isinstance(r, list) or len(r) != n for r in rows):
            raise FamilyFileError(f"member {idx}: expected a list of length-{n} rows")
        for r in rows:
            for x in r:
                if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < q:
                    raise FamilyFileError(f"member {idx}: {x!r} is not an element encoding of GF({q})")
        S = rref_canonical(rows, Fq, n)
        if S.dim != k:
            raise FamilyFileError(f"member {idx} spans dimension {S.dim}, expected {k}")
        if len(rows) != k or not is_rref(rows):
            warnings.warn(f"member {idx} was not in RREF; canonicalized", FamilyFileWarning, stacklevel=3)
        positions.append(G.position(S))
    if len(set(positions)) != len(positions):
        warnings.warn(f"{len(positions) - len(set(positions))} duplicate member(s) dropped", FamilyFileWarning, stacklevel=3)
    prov = data.get("provenance") or {"kind": "file"}
    return Family.of(G, positions, prov)


def load_family(path: str | Path, cap: int = DEFAULT_CAP) -> Family:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FamilyFileError(f"{path}: not valid JSON ({exc})") from exc
    return family_from_dict(data, cap=cap)


# reports for the command line ---------------------------------------------------


def intersecting_report(F: Family) -> Report:
    report = Report("intersecting", {"n": F.n, "k": F.k, "q": F.q, "size": len(F)})
    ok, pair = is_intersecting(F)
    if not ok:
        report.fail({"pair": [[list(r) for r in S.basis] for S in pair]})
    return report


def degree_report(F: Family, d: int) -> Report:
    """Summary of a :class:`DegreeProfile`: minimum, witness and degree histogram."""
    report = Report("degree_profile", {"n": F.n, "k": F.k, "q": F.q, "d": d, "size": len(F)})
    prof = degree_profile(F, d)
    hist: dict[int, int] = {}
    for x in prof.degrees:
        hist[x] = hist.get(x, 0) + 1
    report.details = {
        "delta": prof.delta,
        "argmin_subspace": [list(r) for r in prof.witness.basis],
        "degree_sum": sum(prof.degrees),
        "histogram": {str(x): c for x, c in sorted(hist.items())},
    }
    return report
