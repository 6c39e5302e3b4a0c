import math
import random
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.special import betainc as scipy_betainc

from dotrank.popcone import (
    ConeMembershipResult,
    ConeProblem,
    cap_decay_profile,
    cone_dimension_bound,
    dominance_check,
    dump_cone_problem,
    in_multi_cone,
    in_singleton_cone,
    load_cone_problem,
    query_set_witness,
    regularized_incomplete_beta,
    singleton_rejection_witness,
    spherical_cap_ratio,
)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


P2 = ((2, 1), (1, 2))
L2 = ((0, 0), (-1, -1))
PROB2 = ConeProblem(P=P2, L=L2)


def _random_separable_problem(rng, d):
    """A problem built around a known separating direction."""
    q_star = tuple(F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(d))
    if all(c == 0 for c in q_star):
        q_star = (F(1),) + tuple(F(0) for _ in range(d - 1))
    P, L = [], []
    while len(P) < 3:
        v = tuple(F(rng.randint(-6, 6)) for _ in range(d))
        if _dot(q_star, v) > 0:
            P.append(v)
    while len(L) < 2:
        v = tuple(F(rng.randint(-6, 6)) for _ in range(d))
        if _dot(q_star, v) < 0:
            L.append(v)
    return ConeProblem(P=tuple(P), L=tuple(L))


class TestConeProblem:
    def test_construction_exact(self):
        prob = ConeProblem(P=[["1/2", 1]], L=[[0, "-2/3"]])
        assert prob.d == 2
        assert prob.P[0] == (F(1, 2), F(1))
        assert prob.L[0] == (F(0), F(-2, 3))

    def test_needs_both_sides(self):
        with pytest.raises(ValueError, match="at least one"):
            ConeProblem(P=[], L=[(1,)])
        with pytest.raises(ValueError, match="at least one"):
            ConeProblem(P=[(1,)], L=[])

    def test_dimension_consistency(self):
        with pytest.raises(ValueError, match="dimensions"):
            ConeProblem(P=[(1, 2)], L=[(1,)])


class TestQuerySetWitness:
    def test_axis_separator(self):
        w = query_set_witness(ConeProblem(P=[(1, 0)], L=[(-1, 0)]))
        assert w.feasible
        assert _dot(w.q, (2, 0)) >= 1

    def test_midpoint_blocks_separation(self):
        w = query_set_witness(ConeProblem(P=[(1, 0), (-1, 0)], L=[(0, 0)]))
        assert not w.feasible

    def test_construct_then_solve(self):
        rng = random.Random(11)
        for d in (2, 3, 4):
            prob = _random_separable_problem(rng, d)
            w = query_set_witness(prob)
            assert w.feasible
            worst_p = min(_dot(w.q, p) for p in prob.P)
            best_l = max(_dot(w.q, l) for l in prob.L)
            assert worst_p - best_l >= 1  # exact rational margin


class TestSingletonCone:
    L = (0, 0)

    def test_popular_vector_is_member(self):
        res = in_singleton_cone(P2, self.L, P2[0])
        assert res.member and all(c >= 0 for c in res.lam)

    def test_apex_is_member_with_zero_certificate(self):
        res = in_singleton_cone(P2, self.L, self.L)
        assert res.member and all(c == 0 for c in res.lam)

    def test_opposite_ray_is_not_member(self):
        p1 = ((3, 1),)
        s = tuple(-c for c in p1[0])  # l - (p1 - l) with l = 0
        res = in_singleton_cone(p1, self.L, s)
        assert not res.member and res.lam is None
        assert not bool(res)

    def test_interior_combination_certified(self):
        # s = l + 2(p1 - l) + 3(p2 - l)
        s = (2 * 2 + 3 * 1, 2 * 1 + 3 * 2)
        res = in_singleton_cone(P2, self.L, s)
        assert res.member
        rebuilt = [F(0), F(0)]
        for coef, p in zip(res.lam, P2):
            rebuilt = [r + coef * F(c) for r, c in zip(rebuilt, p)]
        assert tuple(rebuilt) == (F(7), F(8))

    def test_rejections_come_with_separating_query(self):
        rng = random.Random(23)
        for _ in range(25):
            P = tuple(
                tuple(F(rng.randint(-5, 5)) for _ in range(2)) for _ in range(2)
            )
            l = tuple(F(rng.randint(-5, 5)) for _ in range(2))
            s = tuple(F(rng.randint(-8, 8)) for _ in range(2))
            res = in_singleton_cone(P, l, s)
            witness = singleton_rejection_witness(P, l, s)
            if res.member:
                assert witness is None
            else:
                assert witness is not None
                assert all(_dot(witness, tuple(a - b for a, b in zip(p, l))) >= 0 for p in P)
                assert _dot(witness, l) - _dot(witness, s) >= 1


class TestMultiCone:
    def test_centroid_of_popular_set(self):
        s = ("3/2", "3/2")
        res = in_multi_cone(PROB2, s)
        assert res.member
        assert sum(res.mu) == 1 and all(m >= 0 for m in res.mu)
        assert all(c >= 0 for row in res.lam for c in row)

    def test_one_ray_step(self):
        # p1 + (p1 - l1)
        s = (4, 2)
        assert in_multi_cone(PROB2, s).member

    def test_long_tail_vector_is_not_member(self):
        assert query_set_witness(PROB2).feasible
        assert not in_multi_cone(PROB2, L2[0]).member

    def test_convexity_of_accepted_set(self):
        a, b = ("3/2", "3/2"), (4, 2)
        assert in_multi_cone(PROB2, a).member and in_multi_cone(PROB2, b).member
        for t in (F(1, 3), F(1, 2), F(3, 4)):
            mix = tuple(t * F(x) + (1 - t) * F(y) for x, y in zip((F(3, 2), F(3, 2)), (F(4), F(2))))
            assert in_multi_cone(PROB2, mix).member

    def test_acceptance_survives_growing_the_problem(self):
        s = (4, 2)
        assert in_multi_cone(PROB2, s).member
        bigger_p = ConeProblem(P=P2 + ((5, 5),), L=L2)
        bigger_l = ConeProblem(P=P2, L=L2 + ((-2, 0),))
        assert in_multi_cone(bigger_p, s).member
        assert in_multi_cone(bigger_l, s).member

    def test_random_generated_points_accepted_and_dominant(self):
        rng = random.Random(31)
        for trial in range(10):
            prob = _random_separable_problem(rng, 2)
            mu_raw = [rng.randint(0, 4) for _ in prob.P]
            if sum(mu_raw) == 0:
                mu_raw[0] = 1
            mu = [F(m, sum(mu_raw)) for m in mu_raw]
            s = [F(0)] * prob.d
            for m, p in zip(mu, prob.P):
                s = [x + m * c for x, c in zip(s, p)]
            for p in prob.P:
                for l in prob.L:
                    lam = F(rng.randint(0, 3))
                    s = [x + lam * (pc - lc) for x, pc, lc in zip(s, p, l)]
            res = in_multi_cone(prob, tuple(s))
            assert res.member
            # exact dominance under the separating witness
            q = query_set_witness(prob).q
            assert _dot(q, s) >= max(_dot(q, l) for l in prob.L)


class TestDominance:
    def test_members_dominate(self):
        assert dominance_check(PROB2, (4, 2), trials=40, seed=0)
        assert dominance_check(PROB2, ("3/2", "3/2"), trials=40, seed=1)

    def test_popular_vector_dominates(self):
        assert dominance_check(PROB2, P2[0], trials=25, seed=2)

    def test_adversarial_point_caught(self):
        # below every long-tail vector along the separator: any feasible
        # query rejects it on the first trial
        s = (-10, -10)
        assert not dominance_check(PROB2, s, trials=3, seed=3)

    def test_requires_strict_feasibility(self):
        prob = ConeProblem(P=[(1, 0), (-1, 0)], L=[(0, 0)])
        with pytest.raises(ValueError, match="feasible"):
            dominance_check(prob, (1, 0), trials=5, seed=0)

    def test_trials_validated(self):
        with pytest.raises(ValueError, match="trials"):
            dominance_check(PROB2, (4, 2), trials=0, seed=0)

    def test_singleton_acceptance_for_every_tail_implies_dominance(self):
        # s - l lies in the ray cone for each long-tail vector separately
        s = (3, 3)
        for l in L2:
            assert in_singleton_cone(P2, l, s).member
        assert dominance_check(PROB2, s, trials=30, seed=4)

    def test_deterministic_given_seed(self):
        kwargs = dict(trials=10, seed=7)
        assert dominance_check(PROB2, (4, 2), **kwargs) == dominance_check(
            PROB2, (4, 2), **kwargs
        )


class TestConeDimensionBound:
    def test_values(self):
        assert cone_dimension_bound(ConeProblem(P=[(1,)] , L=[(0,)])) == 2
        three_two = ConeProblem(P=[(1, 0), (2, 0), (3, 0)], L=[(0, 1), (0, 2)])
        assert cone_dimension_bound(three_two) == 8
        five_three = ConeProblem(
            P=[(i, 1) for i in range(5)], L=[(i, -1) for i in range(3)]
        )
        assert cone_dimension_bound(five_three) == 18


class TestIncompleteBeta:
    def test_uniform_case(self):
        assert regularized_incomplete_beta(0.3, 1.0, 1.0) == pytest.approx(0.3, rel=1e-12)

    def test_endpoints(self):
        assert regularized_incomplete_beta(0.0, 2.0, 3.0) == 0.0
        assert regularized_incomplete_beta(1.0, 2.0, 3.0) == 1.0

    def test_closed_form_power_tail(self):
        expected = 1.0 - 0.75**0.5
        assert regularized_incomplete_beta(0.25, 1.0, 0.5) == pytest.approx(
            expected, rel=1e-10
        )

    def test_symmetry_relation(self):
        rng = random.Random(5)
        for _ in range(50):
            x = rng.uniform(0.01, 0.99)
            a = rng.uniform(0.1, 8.0)
            b = rng.uniform(0.1, 8.0)
            left = regularized_incomplete_beta(x, a, b)
            right = 1.0 - regularized_incomplete_beta(1.0 - x, b, a)
            assert left == pytest.approx(right, rel=1e-9, abs=1e-12)

    def test_against_scipy(self):
        rng = random.Random(6)
        worst = 0.0
        for _ in range(200):
            x = rng.uniform(0.0, 1.0)
            a = rng.uniform(0.05, 20.0)
            b = rng.uniform(0.05, 20.0)
            ours = regularized_incomplete_beta(x, a, b)
            ref = float(scipy_betainc(a, b, x))
            worst = max(worst, abs(ours - ref) / max(abs(ref), 1e-300))
            assert ours == pytest.approx(ref, rel=1e-10, abs=1e-13)
        assert worst < 1e-10

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            regularized_incomplete_beta(-0.1, 1.0, 1.0)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(1.1, 1.0, 1.0)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(0.5, 0.0, 1.0)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(0.5, 1.0, -2.0)


class TestSphericalCap:
    def test_hemisphere(self):
        for d in (2, 3, 7, 50):
            assert spherical_cap_ratio(math.pi / 2, d) == pytest.approx(0.5, rel=1e-10)

    def test_circle_arc_fraction(self):
        assert spherical_cap_ratio(math.pi / 6, 2) == pytest.approx(1 / 6, rel=1e-9)
        for theta in (0.2, 0.7, 1.1):
            assert spherical_cap_ratio(theta, 2) == pytest.approx(theta / math.pi, rel=1e-9)

    def test_sphere_cap_area(self):
        assert spherical_cap_ratio(math.pi / 3, 3) == pytest.approx(0.25, rel=1e-10)
        for theta in (0.3, 0.9, 1.4):
            expected = (1.0 - math.cos(theta)) / 2.0
            assert spherical_cap_ratio(theta, 3) == pytest.approx(expected, rel=1e-10)

    def test_monotone_in_theta(self):
        values = [spherical_cap_ratio(t, 5) for t in np.linspace(0.05, 1.5, 12)]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_monotone_decreasing_in_dimension(self):
        theta = math.pi / 4
        values = [spherical_cap_ratio(theta, d) for d in (2, 3, 5, 9, 17)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_monte_carlo_agreement(self):
        rng = np.random.default_rng(19)
        d, theta = 4, math.pi / 4
        x = rng.normal(size=(100_000, d))
        cos_angle = x[:, 0] / np.linalg.norm(x, axis=1)
        hit = float(np.mean(cos_angle >= math.cos(theta)))
        expected = spherical_cap_ratio(theta, d)
        sigma = math.sqrt(expected * (1 - expected) / 100_000)
        assert abs(hit - expected) < 5 * sigma

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            spherical_cap_ratio(-0.1, 3)
        with pytest.raises(ValueError):
            spherical_cap_ratio(math.pi / 2 + 0.01, 3)
        with pytest.raises(ValueError):
            spherical_cap_ratio(0.5, 1)


class TestCapDecayProfile:
    def test_strict_decay_across_dimensions(self):
        rows = cap_decay_profile(math.pi / 6, [3, 5])
        assert rows[0][1] > rows[1][1]

    def test_right_angle_keeps_constant_ratio(self):
        rows = cap_decay_profile(math.pi / 2, [2, 3, 6, 11])
        for _, ratio, _ in rows:
            assert ratio == pytest.approx(0.5, rel=1e-10)

    def test_normalized_column_settles(self):
        rows = cap_decay_profile(math.pi / 4, [9, 17, 33])
        last, prev = rows[-1][2], rows[-2][2]
        assert abs(last - prev) / prev < 0.25

    def test_rows_carry_dimension(self):
        rows = cap_decay_profile(0.5, [3, 4])
        assert [r[0] for r in rows] == [3, 4]

    def test_theta_domain(self):
        with pytest.raises(ValueError):
            cap_decay_profile(0.0, [3])
        with pytest.raises(ValueError):
            cap_decay_profile(2.0, [3])


class TestConeProblemIO:
    def test_round_trip(self, tmp_path):
        prob = ConeProblem(P=[("1/3", 2), (1, 1)], L=[(0, "-5/7")])
        path = tmp_path / "cones.json"
        dump_cone_problem(prob, path)
        again = load_cone_problem(path)
        assert again == prob

    def test_header_mismatch(self, tmp_path):
        import json

        path = tmp_path / "cones.json"
        payload = {"d": 3, "P": [["1", "2"]], "L": [["0", "0"]]}
        path.write_text(json.dumps(payload))
        with pytest.raises(ValueError, match="does not match"):
            load_cone_problem(path)
