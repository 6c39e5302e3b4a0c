"""Seeded synthetic interaction generators.

Two flavors: a clean low-rank world where a factorization model should
shine, and a popularity-skewed world (Zipf item frequencies modulated
by per-user taste) that reproduces the qualitative popularity-bias
trade-offs at desk scale.
"""

from __future__ import annotations

import numpy as np

from .datasets import Interactions

__all__ = ["low_rank_interactions", "zipf_interactions"]


def low_rank_interactions(
    n_users: int,
    n_items: int,
    rank: int = 2,
    per_user: int = 10,
    seed: int = 0,
) -> Interactions:
    """Each user interacts with their ``per_user`` highest-scoring items
    under a random rank-``rank`` score matrix."""
    if per_user > n_items:
        raise ValueError("per_user cannot exceed the catalog size")
    rng = np.random.default_rng(seed)
    p = rng.normal(size=(n_users, rank))
    q = rng.normal(size=(n_items, rank))
    scores = p @ q.T
    pairs = set()
    for u in range(n_users):
        top = np.argpartition(-scores[u], per_user - 1)[:per_user]
        for v in top:
            pairs.add((u, int(v)))
    return Interactions(n_users, n_items, pairs)


def zipf_interactions(
    n_users: int,
    n_items: int,
    exponent: float = 1.0,
    latent_rank: int = 8,
    taste_weight: float = 1.5,
    per_user: tuple[int, int] = (20, 40),
    seed: int = 0,
) -> Interactions:
    """Popularity-skewed interactions with a personal component.

    Item v's base appeal falls off as 1 / (v + 1)^exponent; on top of
    that each user has a latent taste vector shifting their log-odds by
    taste_weight * <x_u, y_v> / sqrt(latent_rank). Each user draws a
    uniform count in ``per_user`` and picks that many distinct items by
    the Gumbel-max trick, i.e. a Plackett-Luce sample from the softmax
    of their utilities.
    """
    lo, hi = per_user
    if not 1 <= lo <= hi <= n_items:
        raise ValueError("per_user bounds must satisfy 1 <= lo <= hi <= n_items")
    rng = np.random.default_rng(seed)
    log_pop = -exponent * np.log(np.arange(1, n_items + 1, dtype=np.float64))
    x = rng.normal(size=(n_users, latent_rank))
    y = rng.normal(size=(n_items, latent_rank))
    taste = taste_weight * (x @ y.T) / np.sqrt(latent_rank)
    pairs = set()
    for u in range(n_users):
        n_u = int(rng.integers(lo, hi + 1))
        gumbel = rng.gumbel(size=n_items)
        utility = log_pop + taste[u] + gumbel
        top = np.argpartition(-utility, n_u - 1)[:n_u]
        for v in top:
            pairs.add((u, int(v)))
    return Interactions(n_users, n_items, pairs)
