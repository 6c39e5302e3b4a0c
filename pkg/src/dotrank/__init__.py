"""dotrank: a workbench for dot-product recommenders.

One half trains and evaluates implicit-feedback matrix factorization
models and simulates the closed feedback loop where a recommender only
learns from pairs it has itself surfaced. The other half is an
exact-arithmetic lab for the geometry of dot-product rankings: which
top-K lists a query vector can realize, region-count bounds, convex
hull facets, and popularity cones, all decided with rational LPs and
cross-checked against brute-force oracles.
"""

from . import datasets, exactlp, ials, loop, metrics, popcone, rankgeom, synthetic

__version__ = "0.1.0"

__all__ = [
    "datasets",
    "exactlp",
    "ials",
    "loop",
    "metrics",
    "popcone",
    "rankgeom",
    "synthetic",
    "__version__",
]
