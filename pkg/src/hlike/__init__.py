"""Metric two-step nilpotent Lie algebras with constant J-spectrum.

Build algebras from J-matrices or named examples, decide where they sit in
the chain H-type => H-like => constant spectrum, combine them with the
standard constructions, classify the J-rank two case, and search for new
subspaces of cones over conjugacy classes in so(q).
"""

from hlike.algebra import MetricAlgebra, bracket, j_of, standard_from_subspace, transform
from hlike.construct import central_sum, direct_sum, submersion_quotient, subspace_sum, tensor_product
from hlike.fixtures import fixture
from hlike.multiset import AdmissibleMultiset
from hlike.rank_two import classify_rank_two, eigenspace_intersection_profile
from hlike.search import SearchProblem, run_search
from hlike.verify import Verdict, classify, cone_membership, constant_spectrum, j_unitary_defect, subspace_in_cone

__all__ = [
    "AdmissibleMultiset",
    "MetricAlgebra",
    "SearchProblem",
    "Verdict",
    "bracket",
    "central_sum",
    "classify",
    "classify_rank_two",
    "cone_membership",
    "constant_spectrum",
    "direct_sum",
    "eigenspace_intersection_profile",
    "fixture",
    "j_of",
    "j_unitary_defect",
    "run_search",
    "standard_from_subspace",
    "submersion_quotient",
    "subspace_sum",
    "tensor_product",
    "transform",
]
