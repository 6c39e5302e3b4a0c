import itertools
from fractions import Fraction as F

import pytest

from dotrank.rankgeom import (
    ItemVectorSet,
    Facet,
    cyclic_polytope,
    enumerate_representable,
    facet_permutation,
    facets,
    is_representable,
    random_item_vectors,
)

SQUARE = ItemVectorSet([(0, 0), (1, 0), (0, 1), (1, 1)])
TRIANGLE_PLUS_INNER = ItemVectorSet([(1, 0), (-1, 0), (0, 1), (0, "1/2")])
SIMPLEX_3D = ItemVectorSet([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _gale_even_subsets(n, d):
    """Facet subsets of a cyclic polytope with increasing parameters.

    A d-subset S of {0..n-1} supports a facet exactly when every two
    indices outside S have an even number of S-elements strictly between
    them (evenness condition). Purely combinatorial; no geometry.
    """
    out = set()
    for subset in itertools.combinations(range(n), d):
        s = set(subset)
        outside = [i for i in range(n) if i not in s]
        ok = True
        for i, j in itertools.combinations(outside, 2):
            between = sum(1 for k in subset if i < k < j)
            if between % 2 == 1:
                ok = False
                break
        if ok:
            out.add(subset)
    return out


class TestFacets:
    def test_square_has_four_edges(self):
        fs = facets(SQUARE)
        assert [f.vertices for f in fs] == [(0, 1), (0, 2), (1, 3), (2, 3)]

    def test_facet_equalities_are_exact(self):
        for ivs in (SQUARE, TRIANGLE_PLUS_INNER, SIMPLEX_3D):
            for f in facets(ivs):
                for i in range(ivs.n):
                    value = _dot(f.normal, ivs.vectors[i])
                    if i in f.vertices:
                        assert value == f.offset
                    else:
                        assert value < f.offset

    def test_normals_are_primitive_integers(self):
        import math

        for ivs in (SQUARE, TRIANGLE_PLUS_INNER, SIMPLEX_3D):
            for f in facets(ivs):
                ints = [c for c in f.normal] + [f.offset]
                assert all(c.denominator == 1 for c in ints)
                g = math.gcd(*(abs(int(c)) for c in ints))
                assert g == 1

    def test_inner_point_on_no_facet(self):
        fs = facets(TRIANGLE_PLUS_INNER)
        assert [f.vertices for f in fs] == [(0, 1), (0, 2), (1, 2)]
        assert all(3 not in f.vertices for f in fs)

    def test_simplex_has_four_triangles(self):
        fs = facets(SIMPLEX_3D)
        assert len(fs) == 4
        assert {f.vertices for f in fs} == {(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)}

    def test_structural_equality(self):
        assert facets(SQUARE) == facets(SQUARE)
        f = facets(SQUARE)[0]
        assert f == Facet(vertices=f.vertices, normal=f.normal, offset=f.offset)

    def test_needs_enough_points(self):
        with pytest.raises(ValueError, match="at least"):
            facets(ItemVectorSet([(0, 0), (1, 1)]))

    def test_rejects_degenerate_inputs(self):
        collinear = ItemVectorSet([(0, 0), (1, 1), (2, 2), (0, 1)])
        with pytest.raises(ValueError, match="general position"):
            facets(collinear)

    def test_moment_curve_plane_points_all_exposed(self):
        ivs = cyclic_polytope(5, 2, [0, 1, 2, 3, 4])
        fs = facets(ivs)
        exposed = {i for f in fs for i in f.vertices}
        assert exposed == set(range(5))

    def test_moment_curve_matches_evenness_oracle(self):
        ivs = cyclic_polytope(8, 4, list(range(1, 9)))
        fs = facets(ivs)
        assert len(fs) == 20
        assert {f.vertices for f in fs} == _gale_even_subsets(8, 4)

    def test_evenness_oracle_smaller_case(self):
        ivs = cyclic_polytope(6, 4, list(range(1, 7)))
        assert {f.vertices for f in facets(ivs)} == _gale_even_subsets(6, 4)


class TestFacetPermutation:
    def test_square_top_edge(self):
        fs = facets(SQUARE)
        top = next(f for f in fs if f.vertices == (2, 3))
        witness, pi = facet_permutation(SQUARE, top)
        assert set(pi.entries) == {2, 3}
        assert is_representable(SQUARE, pi).feasible
        assert witness.feasible

    def test_triangle_facets_rank_their_vertices(self):
        for f in facets(TRIANGLE_PLUS_INNER):
            witness, pi = facet_permutation(TRIANGLE_PLUS_INNER, f)
            assert set(pi.entries) == set(f.vertices)
            assert is_representable(TRIANGLE_PLUS_INNER, pi).feasible

    def test_witness_margins_at_least_one(self):
        for f in facets(SIMPLEX_3D):
            witness, pi = facet_permutation(SIMPLEX_3D, f)
            order = pi.entries
            rows = [SIMPLEX_3D.difference(a, b) for a, b in zip(order, order[1:])]
            outside = [j for j in range(SIMPLEX_3D.n) if j not in set(order)]
            rows += [SIMPLEX_3D.difference(order[-1], j) for j in outside]
            assert all(_dot(witness.q, r) >= 1 for r in rows)

    def test_random_3d_instance_all_facets(self):
        ivs = random_item_vectors(7, 3, seed=17, require_distinct_differences=False)
        fs = facets(ivs)
        assert fs  # a bounded full-dimensional hull has facets
        for f in fs:
            witness, pi = facet_permutation(ivs, f)
            assert set(pi.entries) == set(f.vertices)
            assert len(pi) == 3
            assert is_representable(ivs, pi).feasible

    def test_facet_count_lower_bounds_short_rankings(self):
        # every facet contributes a distinct realizable d-ranking
        ivs = random_item_vectors(5, 2, seed=23)
        count, perms = enumerate_representable(ivs, 2)
        fs = facets(ivs)
        assert count >= len(fs)
        facet_sets = {frozenset(f.vertices) for f in fs}
        realized_sets = {frozenset(p) for p in perms}
        assert facet_sets <= realized_sets
