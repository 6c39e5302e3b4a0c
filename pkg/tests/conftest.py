import random

import numpy as np
import pytest

from dotrank.datasets import Interactions


@pytest.fixture
def tiny_interactions() -> Interactions:
    """3 users x 4 items with a fixed pair set used across modules."""
    return Interactions(3, 4, {(0, 0), (0, 1), (0, 3), (1, 1), (1, 2), (2, 3)})


@pytest.fixture
def medium_interactions() -> Interactions:
    """A reproducible 12 x 15 instance with 6 items per user."""
    rng = random.Random(4)
    pairs = set()
    for u in range(12):
        for v in rng.sample(range(15), 6):
            pairs.add((u, v))
    return Interactions(12, 15, pairs)


def random_interactions(n_users, n_items, density, seed) -> Interactions:
    rng = np.random.default_rng(seed)
    mask = rng.random((n_users, n_items)) < density
    # every user and item keeps at least one pair so counts stay positive
    for u in range(n_users):
        if not mask[u].any():
            mask[u, rng.integers(n_items)] = True
    for v in range(n_items):
        if not mask[:, v].any():
            mask[rng.integers(n_users), v] = True
    pairs = {(int(u), int(v)) for u, v in zip(*np.nonzero(mask))}
    return Interactions(n_users, n_items, pairs)
