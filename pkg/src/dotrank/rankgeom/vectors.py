"""Exact-rational item vector sets for the ranking geometry lab.

Vectors are tuples of fractions.Fraction. Floats are converted through
their exact binary expansion, so every downstream feasibility question
is decided exactly.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction

import numpy as np

from ..exactlp import to_fraction

__all__ = [
    "ItemVectorSet",
    "cyclic_polytope",
    "random_item_vectors",
    "load_item_vectors",
    "dump_item_vectors",
]


def _vec(values) -> tuple[Fraction, ...]:
    return tuple(to_fraction(x) for x in values)


def det(matrix: list[list[Fraction]]) -> Fraction:
    """Exact determinant by fraction-free column pivoting elimination."""
    a = [list(row) for row in matrix]
    k = len(a)
    sign = Fraction(1)
    for col in range(k):
        piv = next((r for r in range(col, k) if a[r][col] != 0), -1)
        if piv < 0:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        for r in range(col + 1, k):
            f = a[r][col] / a[col][col]
            if f != 0:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    prod = sign
    for i in range(k):
        prod *= a[i][i]
    return prod


def _parallel(u, w) -> bool:
    """True when u and w span at most a line (all 2x2 minors vanish)."""
    for i, j in itertools.combinations(range(len(u)), 2):
        if u[i] * w[j] - u[j] * w[i] != 0:
            return False
    return True


class ItemVectorSet:
    """n distinct rational vectors in R^d."""

    __slots__ = ("n", "d", "vectors")

    def __init__(self, vectors):
        vecs = tuple(_vec(v) for v in vectors)
        if not vecs:
            raise ValueError("need at least one vector")
        d = len(vecs[0])
        if d < 1:
            raise ValueError("dimension must be at least 1")
        if any(len(v) != d for v in vecs):
            raise ValueError("inconsistent vector dimensions")
        if len(set(vecs)) != len(vecs):
            raise ValueError("vectors must be distinct")
        object.__setattr__(self, "n", len(vecs))
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "vectors", vecs)

    def __setattr__(self, name, value):
        raise AttributeError("ItemVectorSet is immutable")

    def __repr__(self):
        return f"ItemVectorSet(n={self.n}, d={self.d})"

    def __eq__(self, other):
        if not isinstance(other, ItemVectorSet):
            return NotImplemented
        return self.vectors == other.vectors

    def __hash__(self):
        return hash(self.vectors)

    def difference(self, i: int, j: int) -> tuple[Fraction, ...]:
        vi, vj = self.vectors[i], self.vectors[j]
        return tuple(a - b for a, b in zip(vi, vj))

    def is_general_position(self) -> bool:
        """No d+1 vectors lie on a common hyperplane.

        Checked by the exact determinant of the (d+1)x(d+1) matrix whose
        rows are the candidate points extended with a 1: it vanishes
        exactly when the points are affinely dependent. Exhaustive over
        all (d+1)-subsets, so intended for desk-scale n.
        """
        if self.n <= self.d:
            return True
        for subset in itertools.combinations(range(self.n), self.d + 1):
            rows = [list(self.vectors[i]) + [Fraction(1)] for i in subset]
            if det(rows) == 0:
                return False
        return True

    def has_distinct_difference_directions(self) -> bool:
        """No two pairwise differences v_i - v_j are parallel.

        Equivalent to all C(n,2) central hyperplanes orthogonal to the
        differences being distinct, which is what makes region counts
        (and hence full-ranking counts in the plane) attain their
        maximum.
        """
        diffs = [
            self.difference(i, j) for i, j in itertools.combinations(range(self.n), 2)
        ]
        for u, w in itertools.combinations(diffs, 2):
            if _parallel(u, w):
                return False
        return True


def cyclic_polytope(n: int, d: int, t) -> ItemVectorSet:
    """Vectors (t_i, t_i^2, ..., t_i^d) on the moment curve, exactly."""
    ts = [to_fraction(x) for x in t]
    if len(ts) != n:
        raise ValueError(f"expected {n} parameters, got {len(ts)}")
    if len(set(ts)) != len(ts):
        raise ValueError("moment curve parameters must be distinct")
    if d < 1:
        raise ValueError("dimension must be at least 1")
    return ItemVectorSet([[ti**k for k in range(1, d + 1)] for ti in ts])


def random_item_vectors(
    n: int,
    d: int,
    seed: int,
    span: int = 1000,
    require_distinct_differences: bool = True,
    max_attempts: int = 200,
) -> ItemVectorSet:
    """Sample integer-coordinate vectors in general position.

    Coordinates are uniform on [-span, span]. Degenerate draws (repeated
    vectors, d+1 on a hyperplane, or parallel differences when
    requested) are rejected and resampled, which for a wide span almost
    never triggers.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        coords = rng.integers(-span, span + 1, size=(n, d))
        try:
            ivs = ItemVectorSet([[Fraction(int(c)) for c in row] for row in coords])
        except ValueError:
            continue
        if not ivs.is_general_position():
            continue
        if require_distinct_differences and not ivs.has_distinct_difference_directions():
            continue
        return ivs
    raise RuntimeError(f"no generic instance found in {max_attempts} attempts")


def _format_fraction(x: Fraction) -> str:
    return str(x)


def dump_item_vectors(ivs: ItemVectorSet, path) -> None:
    payload = {
        "d": ivs.d,
        "vectors": [[_format_fraction(c) for c in v] for v in ivs.vectors],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_item_vectors(path) -> ItemVectorSet:
    """Read {"d": ..., "vectors": [["p/q", ...], ...]} with rational strings."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    d = payload["d"]
    ivs = ItemVectorSet(payload["vectors"])
    if ivs.d != d:
        raise ValueError(f"vector dimension {ivs.d} does not match header d={d}")
    return ivs
