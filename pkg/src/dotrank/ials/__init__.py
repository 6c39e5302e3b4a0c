"""Implicit-feedback matrix factorization with alternating closed-form
solves.

Scores are plain dot products <phi(u), psi(v)>. The loss puts unit
weight on observed pairs pulled toward 1, a global weight alpha0 on
every unobserved pair pulled toward 0, and a frequency-scaled ridge:

    L = sum_obs (<phi(u), psi(v)> - 1)^2
      + alpha0 * sum_unobs <phi(u), psi(v)>^2
      + reg * (sum_u nu_u ||phi(u)||^2 + sum_v nu_v ||psi(v)||^2)

with nu_u = (count(u) + alpha0 * |V|) ** reg_exponent and symmetrically
for items. The unobserved sum is never materialized: the all-pairs sum
of squared scores is trace((U^T U)(V^T V)), and the observed share is
subtracted — the same bookkeeping that puts the (1 - alpha0) factor in
the per-row normal equations. Each half-sweep solves every row of one
side exactly, so the loss never increases.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from ..datasets import Interactions
from ..errors import NumericError
from .backend import BACKEND, solve_side

__all__ = [
    "BACKEND",
    "Hyperparams",
    "FactorModel",
    "init_model",
    "objective",
    "half_sweep",
    "train",
    "topk",
    "topk_from_scores",
    "popularity_baseline",
    "fold_in_user",
    "save_model",
    "load_model",
]


@dataclass(frozen=True)
class Hyperparams:
    """Solver constants.

    d: embedding dimension. alpha0: weight of unobserved pairs.
    reg: ridge weight (must be positive so the normal equations stay
    nonsingular). reg_exponent: exponent of the frequency scaling of
    the ridge, in [0, 1]. sweeps: full alternating passes. init_scale:
    factor entries start i.i.d. N(0, (init_scale / sqrt(d))^2).
    """

    d: int
    alpha0: float = 0.1
    reg: float = 0.01
    reg_exponent: float = 1.0
    sweeps: int = 10
    seed: int = 0
    init_scale: float = 0.1

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if self.alpha0 < 0:
            raise ValueError("alpha0 must be non-negative")
        if self.reg <= 0:
            raise ValueError("reg must be positive")
        if not 0.0 <= self.reg_exponent <= 1.0:
            raise ValueError("reg_exponent must be in [0, 1]")
        if self.sweeps < 0:
            raise ValueError("sweeps must be non-negative")
        if self.init_scale < 0:
            raise ValueError("init_scale must be non-negative")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FactorModel:
    """User and item factor matrices plus the hyperparameters that
    produced them. Arrays are read-only; operations return new models."""

    user_factors: np.ndarray
    item_factors: np.ndarray
    hyperparams: Hyperparams

    def __post_init__(self):
        uf = _frozen(self.user_factors)
        vf = _frozen(self.item_factors)
        d = self.hyperparams.d
        if uf.ndim != 2 or vf.ndim != 2 or uf.shape[1] != d or vf.shape[1] != d:
            raise ValueError(f"factor matrices must have {d} columns")
        if not (np.isfinite(uf).all() and np.isfinite(vf).all()):
            raise ValueError("factors must be finite")
        object.__setattr__(self, "user_factors", uf)
        object.__setattr__(self, "item_factors", vf)

    @property
    def n_users(self) -> int:
        return self.user_factors.shape[0]

    @property
    def n_items(self) -> int:
        return self.item_factors.shape[0]

    def scores(self, u: int) -> np.ndarray:
        """All item scores for user u."""
        return self.user_factors[u] @ self.item_factors.T


def init_model(n_users: int, n_items: int, hp: Hyperparams) -> FactorModel:
    """Gaussian init, entries N(0, (init_scale / sqrt(d))^2), seeded."""
    if n_users < 1 or n_items < 1:
        raise ValueError("need at least one user and one item")
    rng = np.random.default_rng(hp.seed)
    std = hp.init_scale / np.sqrt(hp.d)
    uf = rng.normal(0.0, std, size=(n_users, hp.d))
    vf = rng.normal(0.0, std, size=(n_items, hp.d))
    return FactorModel(user_factors=uf, item_factors=vf, hyperparams=hp)


def _check_shapes(m: FactorModel, x: Interactions) -> None:
    if m.n_users != x.n_users or m.n_items != x.n_items:
        raise ValueError(
            f"model is {m.n_users}x{m.n_items}, data is {x.n_users}x{x.n_items}"
        )


def _nu(counts: np.ndarray, alpha0: float, n_other: int, exponent: float) -> np.ndarray:
    return (counts.astype(np.float64) + alpha0 * n_other) ** exponent


def objective(m: FactorModel, x: Interactions) -> float:
    """Evaluate the loss.

    The observed sum is accumulated user by user in ascending index
    order; the unobserved sum is the all-pairs Gramian trace minus the
    observed squared scores.
    """
    _check_shapes(m, x)
    hp = m.hyperparams
    uf, vf = m.user_factors, m.item_factors

    indptr, indices = x.to_csr(side="users")
    sq_err = 0.0
    obs_sq = 0.0
    for u in range(x.n_users):
        lo, hi = indptr[u], indptr[u + 1]
        if lo == hi:
            continue
        s = vf[indices[lo:hi]] @ uf[u]
        sq_err += float(((s - 1.0) ** 2).sum())
        obs_sq += float((s**2).sum())

    all_sq = float(((uf.T @ uf) * (vf.T @ vf)).sum())
    nu_u = _nu(x.user_counts, hp.alpha0, x.n_items, hp.reg_exponent)
    nu_v = _nu(x.item_counts, hp.alpha0, x.n_users, hp.reg_exponent)
    ridge = float(nu_u @ (uf**2).sum(axis=1)) + float(nu_v @ (vf**2).sum(axis=1))

    loss = sq_err + hp.alpha0 * (all_sq - obs_sq) + hp.reg * ridge
    if not np.isfinite(loss):
        raise NumericError("non-finite loss")
    return loss


def half_sweep(
    m: FactorModel, x: Interactions, side: str, threads: int = 1
) -> FactorModel:
    """Replace one side's rows with their exact minimizers, the other
    side held fixed."""
    _check_shapes(m, x)
    hp = m.hyperparams
    if side == "users":
        other = m.item_factors
        counts, n_other = x.user_counts, x.n_items
    elif side == "items":
        other = m.user_factors
        counts, n_other = x.item_counts, x.n_users
    else:
        raise ValueError(f"side must be 'users' or 'items', got {side!r}")

    indptr, indices = x.to_csr(side=side)
    gram = other.T @ other
    nu = _nu(counts, hp.alpha0, n_other, hp.reg_exponent)
    solved = solve_side(
        gram, other, indptr, indices, hp.alpha0, hp.reg, nu, threads=threads
    )
    if not np.isfinite(solved).all():
        raise NumericError(f"non-finite factors after {side} half-sweep")
    if side == "users":
        return FactorModel(solved, m.item_factors, hp)
    return FactorModel(m.user_factors, solved, hp)


def train(
    x: Interactions, hp: Hyperparams, threads: int = 1
) -> tuple[FactorModel, list[float]]:
    """Alternate user/item half-sweeps ``hp.sweeps`` times.

    Returns the final model and the loss trace: initial value plus one
    entry per full sweep (sweeps + 1 entries), non-increasing up to
    rounding because each half-sweep is an exact block minimization.
    """
    if hp.sweeps < 1:
        raise ValueError("training needs at least one sweep")
    model = init_model(x.n_users, x.n_items, hp)
    trace = [objective(model, x)]
    for _ in range(hp.sweeps):
        model = half_sweep(model, x, "users", threads=threads)
        model = half_sweep(model, x, "items", threads=threads)
        trace.append(objective(model, x))
    return model, trace


def topk_from_scores(scores: np.ndarray, k: int, exclude=frozenset()) -> list[int]:
    """The k highest-scoring indices outside ``exclude``, descending,
    ties broken by ascending index."""
    scores = np.asarray(scores, dtype=np.float64)
    exclude = frozenset(int(v) for v in exclude)
    available = scores.shape[0] - len(exclude)
    if not 1 <= k <= available:
        raise ValueError(f"k={k} outside [1, {available}]")
    masked = scores.copy()
    if exclude:
        masked[list(exclude)] = -np.inf
    order = np.lexsort((np.arange(masked.shape[0]), -masked))
    return [int(i) for i in order[:k]]


def topk(m: FactorModel, u: int, k: int, exclude=frozenset()) -> list[int]:
    """The k highest-scoring items for user u outside ``exclude``,
    descending, ties broken by ascending item index."""
    if not 0 <= u < m.n_users:
        raise ValueError(f"user {u} out of range")
    return topk_from_scores(m.scores(u), k, exclude)


def popularity_baseline(x: Interactions) -> list[int]:
    """All items by descending interaction count, ties by ascending
    index — the one ranking a query-independent recommender can serve."""
    order = np.lexsort((np.arange(x.n_items), -x.item_counts))
    return [int(i) for i in order]


def fold_in_user(m: FactorModel, items) -> np.ndarray:
    """Factor vector for a new user observed on ``items``, from the same
    per-row solve the half-sweep uses, with the trained item factors."""
    hp = m.hyperparams
    idx = np.asarray(sorted(set(int(i) for i in items)), dtype=np.int64)
    if idx.size and (idx[0] < 0 or idx[-1] >= m.n_items):
        raise ValueError("item index out of range")
    vf = m.item_factors
    indptr = np.array([0, idx.size], dtype=np.int64)
    nu = _nu(np.array([idx.size]), hp.alpha0, m.n_items, hp.reg_exponent)
    row = solve_side(vf.T @ vf, vf, indptr, idx, hp.alpha0, hp.reg, nu)
    return row[0]


_FORMAT = "dotrank-model"
_VERSION = 1


def save_model(m: FactorModel, path) -> None:
    """JSON checkpoint: versioned header, hyperparameters, row-major
    factor matrices."""
    payload = {
        "format": _FORMAT,
        "version": _VERSION,
        "hyperparams": asdict(m.hyperparams),
        "n_users": m.n_users,
        "n_items": m.n_items,
        "user_factors": m.user_factors.tolist(),
        "item_factors": m.item_factors.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> FactorModel:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != _FORMAT:
        raise ValueError(f"not a {_FORMAT} checkpoint")
    if payload.get("version") != _VERSION:
        raise ValueError(f"unsupported checkpoint version {payload.get('version')}")
    hp = Hyperparams(**payload["hyperparams"])
    model = FactorModel(
        user_factors=np.asarray(payload["user_factors"], dtype=np.float64),
        item_factors=np.asarray(payload["item_factors"], dtype=np.float64),
        hyperparams=hp,
    )
    if model.n_users != payload["n_users"] or model.n_items != payload["n_items"]:
        raise ValueError("checkpoint header does not match factor shapes")
    return model
