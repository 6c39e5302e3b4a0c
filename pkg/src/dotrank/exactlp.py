"""Exact linear programming over rationals.

A small two-phase tableau simplex with Bland's rule, used as the
feasibility kernel for strict ranking constraints and cone membership.
Everything is fractions.Fraction so that strict inequalities, pushed to
margin-1 form, are decided without any tolerance.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = [
    "LPResult",
    "to_fraction",
    "feasible_point",
    "maximize",
    "nonneg_solve",
]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


def to_fraction(x) -> Fraction:
    """Coerce ints, floats (exactly), strings like '3/4', and Fractions."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class LPResult:
    """Outcome of a solve: status plus primal point and objective value."""

    __slots__ = ("status", "x", "value")

    def __init__(self, status, x=None, value=None):
        self.status = status
        self.x = x
        self.value = value

    def __repr__(self):
        return f"LPResult({self.status}, x={self.x}, value={self.value})"


def _pivot(tableau, basis, row, col):
    piv = tableau[row][col]
    inv = _ONE / piv
    tableau[row] = [a * inv for a in tableau[row]]
    for i, tr in enumerate(tableau):
        if i != row and tr[col] != 0:
            f = tr[col]
            prow = tableau[row]
            tableau[i] = [a - f * p for a, p in zip(tr, prow)]
    basis[row] = col


def _simplex_phase(tableau, basis, cost, allowed):
    """Maximize cost over the current basic feasible tableau.

    cost maps column -> coefficient; allowed marks columns eligible to
    enter. Bland's rule on both the entering and leaving choice, so the
    phase always terminates. Returns "optimal" or "unbounded".
    """
    m = len(tableau)
    width = len(tableau[0]) - 1
    while True:
        # reduced costs r_j = c_j - c_B . column_j
        cb = [cost[basis[i]] for i in range(m)]
        entering = -1
        for j in range(width):
            if not allowed[j]:
                continue
            r = cost[j]
            for i in range(m):
                if cb[i] != 0 and tableau[i][j] != 0:
                    r -= cb[i] * tableau[i][j]
            if r > 0:
                entering = j
                break
        if entering < 0:
            return OPTIMAL
        leaving = -1
        best = None
        for i in range(m):
            a = tableau[i][entering]
            if a > 0:
                ratio = tableau[i][-1] / a
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[leaving]
                ):
                    best = ratio
                    leaving = i
        if leaving < 0:
            return UNBOUNDED
        _pivot(tableau, basis, leaving, entering)


def _solve_standard(A, b, c):
    """Max c.z subject to A z = b, z >= 0, via two-phase simplex."""
    m = len(A)
    n = len(A[0]) if m else 0
    rows = []
    rhs = []
    for i in range(m):
        if b[i] < 0:
            rows.append([-a for a in A[i]])
            rhs.append(-b[i])
        else:
            rows.append(list(A[i]))
            rhs.append(b[i])

    # phase 1: artificial identity basis
    width = n + m
    tableau = [rows[i] + [_ONE if j == i else _ZERO for j in range(m)] + [rhs[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    cost1 = [_ZERO] * n + [Fraction(-1)] * m
    allowed = [True] * width
    status = _simplex_phase(tableau, basis, cost1, allowed)
    assert status == OPTIMAL  # phase-1 objective is bounded above by 0
    infeas = sum((tableau[i][-1] for i in range(m) if basis[i] >= n), _ZERO)
    if infeas != 0:
        return LPResult(INFEASIBLE)

    # drive artificials out of the basis; drop redundant rows
    for i in range(m - 1, -1, -1):
        if basis[i] < n:
            continue
        col = next((j for j in range(n) if tableau[i][j] != 0), -1)
        if col >= 0:
            _pivot(tableau, basis, i, col)
        else:
            del tableau[i]
            del basis[i]

    # restrict to the original columns
    tableau = [t[:n] + [t[-1]] for t in tableau]
    if c is not None:
        cost2 = list(c)
        allowed = [True] * n
        status = _simplex_phase(tableau, basis, cost2, allowed)
        if status == UNBOUNDED:
            return LPResult(UNBOUNDED)

    x = [_ZERO] * n
    for i, bi in enumerate(basis):
        x[bi] = tableau[i][-1]
    value = None
    if c is not None:
        value = sum((ci * xi for ci, xi in zip(c, x)), _ZERO)
    return LPResult(OPTIMAL, x, value)


def _split_vars(d, q_cols):
    """Recover free variables from their positive/negative parts."""
    return [q_cols[j] - q_cols[d + j] for j in range(d)]


def _inequality_standard_form(rows, rhs, box=None):
    """Encode rows.q >= rhs (q free, optional |q_i| <= box) as A z = b, z >= 0."""
    m = len(rows)
    if m == 0:
        raise ValueError("need at least one constraint")
    d = len(rows[0])
    n_box = 2 * d if box is not None else 0
    n = 2 * d + m + n_box  # q+, q-, surplus, box slacks
    A = []
    b = []
    for k in range(m):
        row = [_ZERO] * n
        for j in range(d):
            row[j] = to_fraction(rows[k][j])
            row[d + j] = -row[j]
        row[2 * d + k] = Fraction(-1)
        A.append(row)
        b.append(to_fraction(rhs[k]))
    if box is not None:
        bx = to_fraction(box)
        if bx <= 0:
            raise ValueError("box must be positive")
        for j in range(d):
            up = [_ZERO] * n
            up[j] = _ONE
            up[d + j] = Fraction(-1)
            up[2 * d + m + j] = _ONE
            A.append(up)
            b.append(bx)
            lo = [_ZERO] * n
            lo[j] = Fraction(-1)
            lo[d + j] = _ONE
            lo[2 * d + m + d + j] = _ONE
            A.append(lo)
            b.append(bx)
    return A, b, d


def feasible_point(rows, rhs):
    """Find q with <q, rows[k]> >= rhs[k] for every k, exactly.

    Returns the witness as a list of Fractions, or None if the system is
    infeasible.
    """
    A, b, d = _inequality_standard_form(rows, rhs)
    res = _solve_standard(A, b, None)
    if res.status != OPTIMAL:
        return None
    return _split_vars(d, res.x)


def maximize(obj, rows, rhs, box):
    """Maximize <obj, q> over {q : rows.q >= rhs, |q_i| <= box}.

    The box keeps the problem bounded; the optimum lands on a vertex, so
    sweeping random objectives yields a spread of exact feasible points.
    """
    A, b, d = _inequality_standard_form(rows, rhs, box=box)
    c = [to_fraction(o) for o in obj]
    cvec = c + [-cj for cj in c] + [_ZERO] * (len(A[0]) - 2 * d)
    res = _solve_standard(A, b, cvec)
    if res.status != OPTIMAL:
        return None
    return _split_vars(d, res.x)


def nonneg_solve(columns, target, simplex_over=None):
    """Find z >= 0 with sum_j z_j * columns[j] = target.

    columns are vectors in R^d. When ``simplex_over`` is a set of column
    indices, those coordinates are additionally constrained to sum to 1.
    Returns the coefficient list or None when no such combination exists.
    """
    k = len(columns)
    if k == 0:
        raise ValueError("need at least one generator")
    d = len(columns[0])
    A = []
    b = []
    for coord in range(d):
        A.append([to_fraction(columns[j][coord]) for j in range(k)])
        b.append(to_fraction(target[coord]))
    if simplex_over is not None:
        A.append([_ONE if j in simplex_over else _ZERO for j in range(k)])
        b.append(_ONE)
    res = _solve_standard(A, b, None)
    if res.status != OPTIMAL:
        return None
    return res.x
