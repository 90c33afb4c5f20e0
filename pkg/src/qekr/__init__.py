"""Exact, reproducible checks for minimum-degree bounds on intersecting
families of subspaces over small finite fields."""

from .exact import ExactMatrix, rank_exact
from .families import (
    Family,
    canonical_pencil,
    check_bounds,
    degree_profile,
    hoffman_check,
    is_intersecting,
    load_family,
    random_intersecting,
    save_family,
)
from .gfq import FieldSpec, make_field
from .grassmann import GrassmannIndex, Subspace, enumerate_subspaces, grassmannian, rref_canonical
from .qarith import TruncatedSeries, bracket, gauss_binom
from .report import Report
from .schemes import build_disjointness, build_incidence, projector_set, spectrum

__version__ = "0.1.0"

__all__ = [
    "ExactMatrix",
    "Family",
    "FieldSpec",
    "GrassmannIndex",
    "Report",
    "Subspace",
    "TruncatedSeries",
    "bracket",
    "build_disjointness",
    "build_incidence",
    "canonical_pencil",
    "check_bounds",
    "degree_profile",
    "enumerate_subspaces",
    "gauss_binom",
    "grassmannian",
    "hoffman_check",
    "is_intersecting",
    "load_family",
    "make_field",
    "projector_set",
    "random_intersecting",
    "rank_exact",
    "rref_canonical",
    "save_family",
    "spectrum",
]
