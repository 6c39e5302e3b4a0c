from fractions import Fraction as F

import pytest

from dotrank.exactlp import feasible_point, maximize, nonneg_solve, to_fraction


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


class TestToFraction:
    def test_exact_float_conversion(self):
        assert to_fraction(0.5) == F(1, 2)
        assert to_fraction(0.1) == F(0.1)  # binary expansion, not 1/10

    def test_strings_and_ints(self):
        assert to_fraction("3/4") == F(3, 4)
        assert to_fraction(7) == F(7)


class TestFeasiblePoint:
    def test_single_halfspace(self):
        q = feasible_point([(F(2), F(0))], [F(1)])
        assert q is not None and _dot(q, (F(2), F(0))) >= 1

    def test_opposed_halfspaces_infeasible(self):
        assert feasible_point([(F(1),), (F(-1),)], [F(1), F(1)]) is None

    def test_mixed_rhs(self):
        # q_x >= 0 together with -q_x >= 0 pins q_x = 0; q_y >= 1 still free
        q = feasible_point([(1, 0), (-1, 0), (0, 1)], [0, 0, 1])
        assert q is not None
        assert q[0] == 0 and q[1] >= 1

    def test_solution_is_exact(self):
        rows = [(F(3), F(1)), (F(-1), F(2)), (F(0), F(-1))]
        rhs = [F(1), F(1), F(-10)]
        q = feasible_point(rows, rhs)
        assert q is not None
        for row, bound in zip(rows, rhs):
            assert _dot(q, row) >= bound  # exact rational comparison

    def test_thin_cone(self):
        # feasible wedge narrower than any float tolerance would resolve
        eps = F(1, 10**12)
        rows = [(F(1), eps), (F(-1), eps)]
        q = feasible_point(rows, [F(0), F(0)])
        assert q is not None
        assert all(_dot(q, r) >= 0 for r in rows)


class TestMaximize:
    def test_box_vertex(self):
        v = maximize([F(1), F(1)], [(F(1), F(0))], [F(0)], box=F(5))
        assert v == [F(5), F(5)]

    def test_constraint_binds(self):
        # maximize x subject to x + y >= 2 inside |.| <= 3: x hits the box
        v = maximize([F(1), F(0)], [(F(1), F(1))], [F(2)], box=F(3))
        assert v is not None and v[0] == 3

    def test_infeasible_returns_none(self):
        assert maximize([F(1)], [(F(1),), (F(-1),)], [F(1), F(1)], box=F(10)) is None


class TestNonnegSolve:
    def test_exact_combination(self):
        cols = [(F(1), F(0)), (F(0), F(1)), (F(1), F(1))]
        z = nonneg_solve(cols, (F(2), F(3)))
        assert z is not None
        assert all(c >= 0 for c in z)
        rebuilt = [sum(z[j] * cols[j][i] for j in range(3)) for i in range(2)]
        assert rebuilt == [F(2), F(3)]

    def test_negative_target_of_positive_cone(self):
        assert nonneg_solve([(F(1),)], (F(-1),)) is None

    def test_simplex_constraint(self):
        cols = [(F(0),), (F(4),), (F(10),)]
        z = nonneg_solve(cols, (F(4),), simplex_over={0, 1, 2})
        assert z is not None
        assert sum(z) == 1
        assert sum(z[j] * cols[j][0] for j in range(3)) == 4

    def test_simplex_infeasible_outside_hull(self):
        cols = [(F(0),), (F(1),)]
        assert nonneg_solve(cols, (F(2),), simplex_over={0, 1}) is None


class TestDegenerateCycling:
    def test_blands_rule_terminates_on_degenerate_instance(self):
        # classic degenerate vertex: many constraints through the origin
        rows = [
            (F(1), F(0), F(0)),
            (F(0), F(1), F(0)),
            (F(0), F(0), F(1)),
            (F(1), F(1), F(0)),
            (F(1), F(0), F(1)),
            (F(0), F(1), F(1)),
            (F(1), F(1), F(1)),
        ]
        q = feasible_point(rows, [F(0)] * 7)
        assert q is not None
        assert all(_dot(q, r) >= 0 for r in rows)
