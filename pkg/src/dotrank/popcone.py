"""Popularity cones: which item vectors are guaranteed to outscore a
long-tail set, and how likely that is to happen by accident.

Given popular vectors P and long-tail vectors L, the query set Q(P, L)
collects the queries scoring every p above every l. An item vector s is
*dominant* when every such query also scores s above all of L. Two
exact-rational tests bound the dominant set from below:

  * singleton (|L| = 1): s - l must be a non-negative combination of
    the rays p_i - l. This test is complete: rejections come with a
    separating query.
  * multi: s must lie in conv(P) swept along all rays p_i - l_j. This
    is sufficient only; the reverse inclusion is not claimed.

The cap functions quantify accidental popularity: the probability that
a uniformly random direction lands within angle theta of a fixed axis,
which for Gaussian-ish item clouds is the chance a random item falls
inside a circular cone of that half-angle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NumericError
from .exactlp import feasible_point, maximize, nonneg_solve, to_fraction
from .rankgeom.represent import RepresentabilityWitness, lp_feasible

__all__ = [
    "ConeProblem",
    "ConeMembershipResult",
    "query_set_witness",
    "in_singleton_cone",
    "in_multi_cone",
    "singleton_rejection_witness",
    "dominance_check",
    "cone_dimension_bound",
    "regularized_incomplete_beta",
    "spherical_cap_ratio",
    "cap_decay_profile",
    "load_cone_problem",
    "dump_cone_problem",
]


def _vec(values):
    return tuple(to_fraction(x) for x in values)


def _sub(u, w):
    return tuple(a - b for a, b in zip(u, w))


def _dot(u, w):
    return sum(a * b for a, b in zip(u, w))


@dataclass(frozen=True)
class ConeProblem:
    """Popular vectors P and long-tail vectors L, all rational in R^d."""

    P: tuple
    L: tuple

    def __post_init__(self):
        P = tuple(_vec(p) for p in self.P)
        L = tuple(_vec(l) for l in self.L)
        if not P or not L:
            raise ValueError("need at least one popular and one long-tail vector")
        d = len(P[0])
        if any(len(v) != d for v in P + L):
            raise ValueError("inconsistent vector dimensions")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "L", L)

    @property
    def d(self) -> int:
        return len(self.P[0])


@dataclass(frozen=True)
class ConeMembershipResult:
    """Verdict plus the non-negative coefficients that reconstruct the
    queried point when it is a member.

    For the singleton test ``lam[i]`` multiplies p_i - l. For the multi
    test ``mu[i]`` (on the simplex) multiplies p_i and ``lam[i][j]``
    multiplies p_i - l_j.
    """

    member: bool
    lam: tuple | None = None
    mu: tuple | None = None

    def __bool__(self):
        return self.member


def query_set_witness(prob: ConeProblem) -> RepresentabilityWitness:
    """A query scoring every popular vector strictly above every
    long-tail vector, or infeasibility.

    The defining inequalities <q, p_i> >= <q, l_j> always admit q = 0,
    so the meaningful question is strict feasibility; by homogeneity
    that is decided at margin 1.
    """
    rows = [_sub(p, l) for p in prob.P for l in prob.L]
    return lp_feasible(rows)


def in_singleton_cone(P, l, s) -> ConeMembershipResult:
    """Is s - l a non-negative combination of the rays p_i - l?

    This characterizes exactly the vectors guaranteed to outscore l
    under every query that scores all of P above l.
    """
    P = tuple(_vec(p) for p in P)
    l = _vec(l)
    s = _vec(s)
    columns = [_sub(p, l) for p in P]
    lam = nonneg_solve(columns, _sub(s, l))
    if lam is None:
        return ConeMembershipResult(member=False)
    rebuilt = l
    for coef, col in zip(lam, columns):
        rebuilt = tuple(r + coef * c for r, c in zip(rebuilt, col))
    if rebuilt != s:
        raise AssertionError("certificate does not reconstruct the point")
    return ConeMembershipResult(member=True, lam=tuple(lam))


def in_multi_cone(prob: ConeProblem, s) -> ConeMembershipResult:
    """Is s in conv(P) plus non-negative steps along every ray
    p_i - l_j?

    Membership is sufficient for dominance over all of L; no claim is
    made about points outside.
    """
    s = _vec(s)
    P, L = prob.P, prob.L
    columns = list(P) + [_sub(p, l) for p in P for l in L]
    z = nonneg_solve(columns, s, simplex_over=set(range(len(P))))
    if z is None:
        return ConeMembershipResult(member=False)
    mu = tuple(z[: len(P)])
    flat = z[len(P) :]
    lam = tuple(
        tuple(flat[i * len(L) + j] for j in range(len(L))) for i in range(len(P))
    )
    rebuilt = tuple(sum(m * p[c] for m, p in zip(mu, P)) for c in range(prob.d))
    for i, p in enumerate(P):
        for j, l in enumerate(L):
            ray = _sub(p, l)
            rebuilt = tuple(r + lam[i][j] * rc for r, rc in zip(rebuilt, ray))
    if rebuilt != s:
        raise AssertionError("certificate does not reconstruct the point")
    return ConeMembershipResult(member=True, lam=lam, mu=mu)


def singleton_rejection_witness(P, l, s):
    """For s rejected by the singleton test, a query q in the closure of
    the query set with <q, s> < <q, l> — the separating certificate that
    makes the rejection checkable.

    Returns the q as a tuple of fractions, or None when no separator
    exists (i.e. s is in fact a member).
    """
    P = tuple(_vec(p) for p in P)
    l = _vec(l)
    s = _vec(s)
    rows = [_sub(p, l) for p in P] + [_sub(l, s)]
    rhs = [Fraction(0)] * len(P) + [Fraction(1)]
    q = feasible_point(rows, rhs)
    return None if q is None else tuple(q)


def dominance_check(prob: ConeProblem, s, trials: int, seed: int) -> bool:
    """Probe dominance of s over L with `trials` strictly feasible
    queries.

    Each trial maximizes a random integer objective over the margin-1
    query set intersected with a box (sized to contain a known interior
    point), landing on a spread of exact vertices. Returns True iff
    <q, s> >= max_j <q, l_j> held — in rational arithmetic — for every
    sampled q.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    witness = query_set_witness(prob)
    if not witness.feasible:
        raise ValueError("query set is not strictly feasible")
    s = _vec(s)
    rows = [_sub(p, l) for p in prob.P for l in prob.L]
    rhs = [Fraction(1)] * len(rows)
    box = 2 * max(Fraction(1), max(abs(c) for c in witness.q))
    d = prob.d
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        obj = [Fraction(int(c)) for c in rng.integers(-10, 11, size=d)]
        q = maximize(obj, rows, rhs, box=box)
        if q is None:
            raise AssertionError("strictly feasible set lost under the box")
        best_l = max(_dot(q, l) for l in prob.L)
        if _dot(q, s) < best_l:
            return False
    return True


def cone_dimension_bound(prob: ConeProblem) -> int:
    """(|P| + 1) * |L|: generators available to the dominant-set cone
    (the convex hull contributes one affine degree per long-tail vector
    beyond the rays), bounding its dimension under the circular-cone
    reading. Compare with the ambient d for a quick sanity read."""
    return (len(prob.P) + 1) * len(prob.L)


_BETA_EPS = 1.0e-15
_BETA_TINY = 1.0e-300
_BETA_MAX_ITER = 400


def _beta_cf(x: float, a: float, b: float) -> float:
    """Continued fraction for the incomplete beta tail (modified Lentz).

    Converges fast for x < (a + 1)/(a + b + 2); the caller routes the
    other half of the domain through the symmetry relation.
    """
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_TINY:
        d = _BETA_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise NumericError(f"incomplete beta did not converge for x={x}, a={a}, b={b}")


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b) to ~1e-10 relative accuracy.

    Uses the continued fraction on whichever side of the split point
    (a + 1)/(a + b + 2) converges quickly, with the symmetry
    I_x(a, b) = 1 - I_{1-x}(b, a) covering the other side.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    if a <= 0.0 or b <= 0.0:
        raise ValueError("a and b must be positive")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(x, a, b) / a
    return 1.0 - front * _beta_cf(1.0 - x, b, a) / b


def spherical_cap_ratio(theta: float, d: int) -> float:
    """Fraction of the unit (d-1)-sphere within angle theta of an axis:
    (1/2) * I_{sin^2 theta}((d - 1)/2, 1/2).

    This is the probability that a uniformly random direction in R^d
    makes an angle at most theta with any fixed direction.
    """
    if not 0.0 <= theta <= math.pi / 2.0:
        raise ValueError(f"theta={theta} outside [0, pi/2]")
    if d < 2:
        raise ValueError("dimension must be at least 2")
    sin2 = math.sin(theta) ** 2
    return 0.5 * regularized_incomplete_beta(sin2, (d - 1) / 2.0, 0.5)


def cap_decay_profile(theta: float, d_list):
    """Cap ratios across dimensions plus their normalization by the
    asymptotic envelope (sin theta)^{d-1} / sqrt(d - 1).

    The normalized column settling toward a constant is the numerical
    face of the exponential decay of accidental popularity with d.
    """
    if not 0.0 < theta <= math.pi / 2.0:
        raise ValueError(f"theta={theta} outside (0, pi/2]")
    out = []
    for d in d_list:
        ratio = spherical_cap_ratio(theta, d)
        envelope = math.sin(theta) ** (d - 1) / math.sqrt(d - 1)
        out.append((d, ratio, ratio / envelope))
    return out


def dump_cone_problem(prob: ConeProblem, path) -> None:
    payload = {
        "d": prob.d,
        "P": [[str(c) for c in v] for v in prob.P],
        "L": [[str(c) for c in v] for v in prob.L],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_cone_problem(path) -> ConeProblem:
    """Read {"d": ..., "P": [["p/q", ...], ...], "L": [...]}."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    prob = ConeProblem(P=payload["P"], L=payload["L"])
    if prob.d != payload["d"]:
        raise ValueError(f"vector dimension {prob.d} does not match header d={payload['d']}")
    return prob
