import json
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qekr.families import (
    Family,
    FamilyFileError,
    FamilyFileWarning,
    NotIntersecting,
    canonical_pencil,
    check_bounds,
    check_e106,
    component_sqnorms,
    degree_profile,
    family_to_dict,
    hoffman_check,
    is_intersecting,
    lemma32_quantities,
    load_family,
    random_intersecting,
    save_family,
    sqnorms_from_moments,
)
from qekr.gfq import make_field
from qekr.grassmann import contains, grassmannian, meet_dim, rref_canonical
from qekr.qarith import gauss_binom


def pencil(n, k, q, point=0):
    return canonical_pencil(grassmannian(n, k, q), grassmannian(n, 1, q)[point])


def test_pencil_sizes():
    assert len(pencil(5, 2, 2)) == 15
    assert len(pencil(7, 3, 2)) == 651 == gauss_binom(6, 2, 2)
    assert len(pencil(3, 3, 2)) == 1
    with pytest.raises(ValueError):
        canonical_pencil(grassmannian(4, 2, 2), grassmannian(4, 2, 2)[0])


def test_pencil_by_containment_scan():
    G = grassmannian(5, 2, 3)
    E = grassmannian(5, 1, 3)[7]
    scan = [i for i, S in enumerate(G) if contains(S, E)]
    assert list(canonical_pencil(G, E).members) == scan


def test_is_intersecting():
    assert is_intersecting(pencil(5, 2, 2))[0]
    G = grassmannian(4, 2, 2)
    F2 = make_field(2)
    a = rref_canonical([(1, 0, 0, 0), (0, 1, 0, 0)], F2)
    b = rref_canonical([(0, 0, 1, 0), (0, 0, 0, 1)], F2)
    ok, pair = is_intersecting(Family.of(G, [G.position(a), G.position(b)]))
    assert not ok and set(pair) == {a, b}
    R = random_intersecting(grassmannian(5, 2, 2), 42, 100)
    members = R.subspaces()
    assert all(meet_dim(S, T) >= 1 for S in members for T in members)


def test_family_invariants():
    G = grassmannian(4, 2, 2)
    with pytest.raises(ValueError):
        Family(G, (3, 1))
    with pytest.raises(ValueError):
        Family(G, (0, 35))


def test_random_generator():
    G = grassmannian(5, 2, 2)
    assert len(random_intersecting(G, 0, 1)) == 1
    assert random_intersecting(G, 11, 30) == random_intersecting(G, 11, 30)
    assert len(random_intersecting(G, 7, 20)) <= 15
    with pytest.raises(ValueError):
        random_intersecting(G, 0, 0)


def test_degree_profile_examples():
    prof = degree_profile(pencil(7, 3, 2), 2)
    assert prof.delta == 1 and sum(prof.degrees) == 7 * 651 == 4557
    assert len(prof.degrees) == 2667
    P5 = pencil(5, 2, 2, point=0)
    prof1 = degree_profile(P5, 1)
    assert prof1.delta == 1
    assert prof1.degree(grassmannian(5, 1, 2)[0]) == 15
    empty = degree_profile(Family.of(grassmannian(5, 2, 2), []), 1)
    assert empty.delta == 0 and set(empty.degrees) == {0}
    with pytest.raises(ValueError):
        degree_profile(P5, 3)


def test_degree_profile_by_scan():
    F = random_intersecting(grassmannian(5, 3, 2), 4, 50)
    G2 = grassmannian(5, 2, 2)
    prof = degree_profile(F, 2, G2)
    members = F.subspaces()
    for s in range(0, len(G2), 7):
        assert prof.degrees[s] == sum(contains(T, G2[s]) for T in members)


@settings(max_examples=25)
@given(st.integers(0, 10_000), st.integers(0, 154))
def test_adding_member_never_decreases_degrees(seed, extra):
    G = grassmannian(5, 2, 2)
    F = random_intersecting(G, seed, 8)
    before = degree_profile(F, 1).degrees
    after = degree_profile(F.with_member(extra), 1).degrees
    assert all(b <= a for b, a in zip(before, after))


def test_check_bounds_pencil_equality():
    r = check_bounds(pencil(7, 3, 2), 2)
    b = r.details["bounds"]
    assert r.passed
    assert b["delta_d"]["value"] == 1 and b["delta_d"]["slack"] == 0
    assert b["size"]["value"] == 651 and b["size"]["slack"] == 0
    r5 = check_bounds(pencil(5, 2, 2), 1)
    assert r5.details["bounds"]["delta_1"] == {"value": 1, "bound": 1, "applicable": True, "slack": 0}


def test_check_bounds_random_and_errors():
    G = grassmannian(7, 3, 2)
    for seed in (1, 2):
        r = check_bounds(random_intersecting(G, seed, 10**6), 2)
        assert r.passed and r.details["bounds"]["delta_d"]["value"] <= 1
    G4 = grassmannian(4, 2, 2)
    with pytest.raises(NotIntersecting):
        check_bounds(Family.of(G4, range(35)), 1)
    r = check_bounds(pencil(4, 2, 2), 1)
    assert r.passed and not r.details["bounds"]["size"]["applicable"]


def test_check_bounds_flags_counterexample_at_max_severity(monkeypatch):
    import qekr.families as fam

    # an impossible bound forces the violation path
    monkeypatch.setattr(fam, "gauss_binom", lambda m, k, q: 0 if (m, k) == (4, 1) else gauss_binom(m, k, q))
    r = fam.check_bounds(pencil(5, 2, 2), 1)
    assert not r.passed and r.status == "COUNTEREXAMPLE"
    assert r.witness["family"]["members"]


@pytest.mark.parametrize("n,k,d,seed", [(4, 2, 1, None), (5, 2, 1, 3), (5, 3, 2, 8)])
def test_e106_two_routes(n, k, d, seed):
    G = grassmannian(n, k, 2)
    F = pencil(n, k, 2) if seed is None else random_intersecting(G, seed, 10**6)
    r = check_e106(F, d)
    assert r.passed and r.details["lhs"] == r.details["rhs"]
    assert check_e106(Family.of(G, []), d).details["lhs"] == 0


def test_hoffman_pencil_is_zero_not_negative():
    r = hoffman_check(pencil(5, 2, 2), 1)
    assert r.residual_zero
    assert r.details["quantity"] == 0 and r.details["tail_weight"] == 0
    assert not r.passed and r.status == "not-strict"


def test_hoffman_strict_when_tail_present():
    G = grassmannian(5, 2, 2)
    # lines of a Fano plane: intersecting, not a pencil
    F = random_intersecting(G, 2, 100)
    r = hoffman_check(F, 1)
    assert len(F) == 7 and r.passed and r.details["quantity"] < 0


def test_hoffman_range_extrapolation():
    r = hoffman_check(pencil(4, 2, 2), 1)
    assert r.status == "range-extrapolation" and r.residual_zero
    assert "sign" in r.details


@settings(max_examples=20)
@given(st.integers(0, 10_000), st.integers(1, 15))
def test_norm_identities_random_families(seed, target):
    F = random_intersecting(grassmannian(5, 2, 2), seed, target)
    norms, _ = component_sqnorms(F)
    assert sum(norms) == len(F)
    assert norms[0] == Fraction(len(F) ** 2, 155)
    assert norms == sqnorms_from_moments(F)
    assert hoffman_check(F, 1).residual_zero


def test_lemma32():
    r = lemma32_quantities(pencil(7, 3, 2), 2)
    assert r.passed and r.status == "hypothesis-not-met"
    G = grassmannian(5, 2, 2)
    e = lemma32_quantities(Family.of(G, []), 1)
    assert e.details["Q"] == e.details["g"] > 0
    assert lemma32_quantities(random_intersecting(grassmannian(7, 3, 2), 5, 10**6), 2).status == "hypothesis-not-met"


def test_family_roundtrip(tmp_path):
    for F in (pencil(5, 2, 2), random_intersecting(grassmannian(4, 2, 4), 3, 30)):
        path = tmp_path / "f.json"
        save_family(F, path)
        assert load_family(path) == F


def _write(tmp_path, data):
    path = tmp_path / "fam.json"
    path.write_text(json.dumps(data))
    return path


def test_family_file_canonicalizes_and_dedupes(tmp_path):
    data = family_to_dict(pencil(4, 2, 2))
    data["members"][0] = [data["members"][0][1], data["members"][0][0]]
    data["members"].append(data["members"][1])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        F = load_family(_write(tmp_path, data))
    msgs = [str(w.message) for w in caught if issubclass(w.category, FamilyFileWarning)]
    assert any("RREF" in m for m in msgs) and any("duplicate" in m for m in msgs)
    assert F.members == pencil(4, 2, 2).members


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d["members"][0][0].__setitem__(3, 5),
        lambda d: d.update(modulus=[1, 1]),
        lambda d: d.update(format_version=99),
        lambda d: d.pop("n"),
        lambda d: d["members"].append([[0, 0, 0, 0], [0, 0, 0, 0]]),
        lambda d: d.update(q=6),
    ],
)
def test_family_file_errors(tmp_path, mutate):
    data = family_to_dict(canonical_pencil(grassmannian(4, 2, 4), grassmannian(4, 1, 4)[0]))
    mutate(data)
    with pytest.raises(FamilyFileError):
        load_family(_write(tmp_path, data))


def test_family_file_not_json(tmp_path):
    path = tmp_path / "bad.fam"
    path.write_text("not json")
    with pytest.raises(FamilyFileError):
        load_family(path)
