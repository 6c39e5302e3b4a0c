"""Exact convex hull facets of an item vector set, and the rankings
they induce.

Every facet F with outward normal a turns into a realizable top-|F|
ranking: a query slightly tilted off a scores the facet's vertices
first (in the tilt order) and everything else after. Hulls here are
brute force over d-subsets -- exact and simple, sized for desk-scale n.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .represent import PartialPermutation, RepresentabilityWitness, _verify_margins
from .vectors import ItemVectorSet

__all__ = ["Facet", "facets", "facet_permutation"]


@dataclass(frozen=True)
class Facet:
    """A hull facet: vertex indices, outward normal, and offset.

    <normal, x> <= offset holds for every vector, with equality exactly
    on the facet's vertices. The normal is canonicalized to a primitive
    integer vector so facets compare and hash structurally.
    """

    vertices: tuple[int, ...]
    normal: tuple[Fraction, ...]
    offset: Fraction


def _nullspace_1d(rows):
    """A nonzero rational solution of rows @ x = 0 when the nullspace is
    one-dimensional, else None."""
    m = len(rows)
    width = len(rows[0])
    a = [list(r) for r in rows]
    pivot_cols = []
    r = 0
    for col in range(width):
        piv = next((i for i in range(r, m) if a[i][col] != 0), -1)
        if piv < 0:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][col]
        a[r] = [x / inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivot_cols.append(col)
        r += 1
        if r == m:
            break
    free = [c for c in range(width) if c not in pivot_cols]
    if len(free) != 1:
        return None
    fc = free[0]
    x = [Fraction(0)] * width
    x[fc] = Fraction(1)
    for row_idx, col in enumerate(pivot_cols):
        x[col] = -a[row_idx][fc]
    return x


def _primitive(normal, offset):
    """Scale (normal, offset) to coprime integers with a fixed sign
    convention carried by the caller's orientation."""
    denoms = [c.denominator for c in normal] + [offset.denominator]
    scale = Fraction(math.lcm(*denoms))
    ints = [int(c * scale) for c in normal] + [int(offset * scale)]
    g = math.gcd(*(abs(v) for v in ints))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(Fraction(v) for v in ints[:-1]), Fraction(ints[-1])


def facets(ivs: ItemVectorSet) -> list[Facet]:
    """All facets of conv(vectors), exactly, by testing every d-subset.

    Requires n >= d + 1 points in general position (so every facet has
    exactly d vertices and no point sits on a supporting hyperplane it
    does not span). Facets come back sorted by vertex tuple.
    """
    n, d = ivs.n, ivs.d
    if n < d + 1:
        raise ValueError(f"need at least d + 1 = {d + 1} vectors, got {n}")
    if not ivs.is_general_position():
        raise ValueError("vectors are not in general position")

    out = []
    for subset in itertools.combinations(range(n), d):
        # Hyperplane <a, x> = b through the subset: rows (v_i, -1) on (a, b).
        rows = [list(ivs.vectors[i]) + [Fraction(-1)] for i in subset]
        sol = _nullspace_1d(rows)
        if sol is None:
            continue
        a, b = tuple(sol[:d]), sol[d]
        if all(c == 0 for c in a):
            continue
        sides = []
        for j in range(n):
            if j in subset:
                continue
            s = sum(x * y for x, y in zip(a, ivs.vectors[j])) - b
            if s == 0:
                raise ValueError("vectors are not in general position")
            sides.append(s)
        if all(s < 0 for s in sides):
            pass
        elif all(s > 0 for s in sides):
            a = tuple(-c for c in a)
            b = -b
        else:
            continue
        a, b = _primitive(a, b)
        out.append(Facet(vertices=subset, normal=a, offset=b))
    out.sort(key=lambda f: f.vertices)
    return out


def _tilt_vector(ivs: ItemVectorSet, facet: Facet):
    """A direction whose inner products with the facet's vertices are
    pairwise distinct. Moment-curve candidates (1, t, t^2, ...) work for
    some small t because each coincidence is a nonzero polynomial in t
    with at most d - 1 roots."""
    d = ivs.d
    t = 0
    while True:
        w = tuple(Fraction(t) ** k for k in range(d))
        scores = [
            sum(a * b for a, b in zip(w, ivs.vectors[i])) for i in facet.vertices
        ]
        if len(set(scores)) == len(scores):
            return w, scores
        t += 1


def facet_permutation(ivs: ItemVectorSet, facet: Facet):
    """Turn a facet into a realizable ranking of its vertices.

    The query q = normal + eps * tilt keeps every facet vertex strictly
    above every non-vertex for small enough eps while the tilt breaks
    the tie among the vertices themselves. Returns (witness, pi) where
    the witness query is rescaled to margin 1 and pi lists the facet's
    vertices in decreasing tilt score.
    """
    a, b = facet.normal, facet.offset
    w, scores = _tilt_vector(ivs, facet)

    on_facet = set(facet.vertices)
    eps_bound = None
    for i in facet.vertices:
        for j in range(ivs.n):
            if j in on_facet:
                continue
            gap = b - sum(x * y for x, y in zip(a, ivs.vectors[j]))  # > 0
            drift = sum(x * y for x, y in zip(w, ivs.difference(i, j)))
            if drift < 0:
                cand = gap / (-drift)
                if eps_bound is None or cand < eps_bound:
                    eps_bound = cand
    eps = eps_bound / 2 if eps_bound is not None else Fraction(1)

    q = tuple(ac + eps * wc for ac, wc in zip(a, w))
    order = tuple(
        i for i, _ in sorted(zip(facet.vertices, scores), key=lambda p: -p[1])
    )
    pi = PartialPermutation(order)

    rows = [ivs.difference(x, y) for x, y in zip(order, order[1:])]
    last = order[-1]
    rows += [ivs.difference(last, j) for j in range(ivs.n) if j not in on_facet]
    margins = [sum(x * y for x, y in zip(q, row)) for row in rows]
    mu = min(margins)
    if mu <= 0:
        raise AssertionError("tilted facet normal fails a strict inequality")
    q = tuple(c / mu for c in q)
    _verify_margins(q, rows)
    return RepresentabilityWitness(feasible=True, q=q), pi
