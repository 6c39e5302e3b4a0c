"""Exact geometry of dot-product top-K rankings."""

from .ae import ae_rank_equivalence
from .hull import Facet, facet_permutation, facets
from .represent import (
    PairwisePreference,
    PartialPermutation,
    RepresentabilityWitness,
    enumerate_representable,
    is_representable,
    lp_feasible,
    region_bound,
)
from .vectors import (
    ItemVectorSet,
    cyclic_polytope,
    dump_item_vectors,
    load_item_vectors,
    random_item_vectors,
)

__all__ = [
    "ItemVectorSet",
    "cyclic_polytope",
    "random_item_vectors",
    "load_item_vectors",
    "dump_item_vectors",
    "PartialPermutation",
    "PairwisePreference",
    "RepresentabilityWitness",
    "lp_feasible",
    "is_representable",
    "enumerate_representable",
    "region_bound",
    "Facet",
    "facets",
    "facet_permutation",
    "ae_rank_equivalence",
]
