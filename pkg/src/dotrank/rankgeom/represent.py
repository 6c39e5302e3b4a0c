"""Which length-K rankings a single query vector can realize.

A ranking prefix pi = (pi_1, ..., pi_K) over an item vector set V is
realizable when some query q scores the listed items in the given order
*and* above every unlisted item:

    <q, v_{pi_i}> > <q, v_{pi_{i+1}}>   for consecutive listed items,
    <q, v_{pi_K}> > <q, v_j>            for every unlisted j.

Unlisted items may tie among themselves without disqualifying pi. All
constraints are homogeneous, so strict feasibility is equivalent to
margin-1 feasibility, which is what the exact LP kernel decides.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from ..exactlp import feasible_point
from .vectors import ItemVectorSet

__all__ = [
    "PartialPermutation",
    "PairwisePreference",
    "RepresentabilityWitness",
    "lp_feasible",
    "is_representable",
    "enumerate_representable",
    "region_bound",
]


@dataclass(frozen=True)
class PartialPermutation:
    """Top-K list of item indices, 0-based, no repeats."""

    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValueError("empty ranking")
        if len(set(entries)) != len(entries):
            raise ValueError("ranking repeats an item")
        if any(e < 0 for e in entries):
            raise ValueError("negative item index")

    def __len__(self):
        return len(self.entries)

    def check_against(self, n: int) -> None:
        if any(e >= n for e in self.entries):
            raise ValueError(f"item index out of range for n={n}")


@dataclass(frozen=True)
class PairwisePreference:
    """Antisymmetric pairwise order: delta[(i, j)] = +1 iff i beats j."""

    n: int
    delta: dict

    @classmethod
    def from_ranking(cls, order) -> "PairwisePreference":
        order = tuple(int(e) for e in order)
        if len(set(order)) != len(order):
            raise ValueError("ranking repeats an item")
        n = len(order)
        pos = {item: k for k, item in enumerate(order)}
        delta = {}
        for i, j in itertools.combinations(sorted(order), 2):
            s = 1 if pos[i] < pos[j] else -1
            delta[(i, j)] = s
            delta[(j, i)] = -s
        return cls(n=n, delta=delta)

    def constraint_rows(self, ivs: ItemVectorSet):
        """One row delta_ij * (v_i - v_j) per unordered pair i < j."""
        rows = []
        for (i, j), s in sorted(self.delta.items()):
            if i < j:
                diff = ivs.difference(i, j)
                rows.append(tuple(s * c for c in diff))
        return rows


@dataclass(frozen=True)
class RepresentabilityWitness:
    """Feasibility verdict plus, when feasible, an exact rational query.

    The stored q satisfies every defining strict inequality with margin
    at least 1 (scaling is free because the constraints are
    homogeneous).
    """

    feasible: bool
    q: tuple | None = None

    def __bool__(self):
        return self.feasible


def _verify_margins(q, rows) -> None:
    for row in rows:
        margin = sum(a * b for a, b in zip(q, row))
        if margin < 1:
            raise AssertionError("witness fails a margin-1 constraint")


def lp_feasible(rows) -> RepresentabilityWitness:
    """Decide {q : <q, row> >= 1 for all rows} exactly.

    A zero row makes the system trivially infeasible and is rejected up
    front; it arises only from repeated items, which the callers already
    forbid, but the guard keeps the kernel honest for direct use.
    """
    rows = [tuple(Fraction(c) if not isinstance(c, Fraction) else c for c in row) for row in rows]
    if not rows:
        raise ValueError("no constraints")
    for row in rows:
        if all(c == 0 for c in row):
            return RepresentabilityWitness(feasible=False)
    q = feasible_point(rows, [Fraction(1)] * len(rows))
    if q is None:
        return RepresentabilityWitness(feasible=False)
    _verify_margins(q, rows)
    return RepresentabilityWitness(feasible=True, q=tuple(q))


def _constraint_rows(ivs: ItemVectorSet, entries, encoding: str):
    rows = []
    if encoding == "adjacent":
        for a, b in zip(entries, entries[1:]):
            rows.append(ivs.difference(a, b))
    elif encoding == "full":
        for a, b in itertools.combinations(entries, 2):
            # a appears before b in the prefix
            rows.append(ivs.difference(a, b))
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    listed = set(entries)
    last = entries[-1]
    for j in range(ivs.n):
        if j not in listed:
            rows.append(ivs.difference(last, j))
    return rows


def is_representable(
    ivs: ItemVectorSet, pi: PartialPermutation, encoding: str = "adjacent"
) -> RepresentabilityWitness:
    """Decide whether some query realizes the top-K list pi over ivs.

    encoding selects the constraint system: "adjacent" uses consecutive
    differences within the prefix (plus last-vs-unlisted), "full" uses
    all ordered pairs in the prefix. Both cut out the same cone; the
    adjacent one is the transitive reduction.
    """
    pi.check_against(ivs.n)
    rows = _constraint_rows(ivs, pi.entries, encoding)
    return lp_feasible(rows)


def _falling_factorial(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


def enumerate_representable(
    ivs: ItemVectorSet,
    k: int,
    encoding: str = "adjacent",
    max_work: int = 50_000,
    prune: bool = True,
):
    """Count and collect every realizable top-k list over ivs.

    Walks the prefix tree of injective sequences. With prune=True a
    prefix whose within-list order is already infeasible is discarded
    before any extension, which is sound because extending a prefix only
    adds constraints. Raises ValueError when the number of candidate
    sequences n!/(n-k)! exceeds max_work.

    Returns (count, frozenset of entry tuples).
    """
    n = ivs.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    total = _falling_factorial(n, k)
    if total > max_work:
        raise ValueError(
            f"enumeration over {total} sequences exceeds max_work={max_work}"
        )

    found = []

    def extend(prefix):
        depth = len(prefix)
        if prune and 2 <= depth < k:
            rows = [ivs.difference(a, b) for a, b in zip(prefix, prefix[1:])]
            if not lp_feasible(rows):
                return
        if depth == k:
            pi = PartialPermutation(tuple(prefix))
            if is_representable(ivs, pi, encoding=encoding):
                found.append(tuple(prefix))
            return
        for nxt in range(n):
            if nxt not in prefix:
                prefix.append(nxt)
                extend(prefix)
                prefix.pop()

    extend([])
    return len(found), frozenset(found)


def region_bound(n: int, d: int) -> int:
    """Maximum number of chambers cut out of R^d by the C(n,2) central
    hyperplanes orthogonal to the pairwise difference vectors:

        2 * sum_{i=0}^{d-1} C(C(n,2) - 1, i)

    Each full ranking of n items realizable by some query occupies at
    least one chamber, so this also bounds the count of realizable full
    rankings.
    """
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    m = math.comb(n, 2)
    return 2 * sum(math.comb(m - 1, i) for i in range(d))
