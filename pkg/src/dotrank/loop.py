"""Closed-loop simulation: the recommender only ever learns from pairs
it has itself surfaced.

Start by observing a fraction of every user's true pairs. Each epoch:
train on the observed set, recommend top-K per user (observed pairs
excluded), then move every recommended pair that exists in the hidden
ground truth into the observed set. The per-epoch user/item recall of
the observed set against the full ground truth is the data-collection
efficiency curve; its saturation short of 1.0 is the feedback loop's
popularity bias made visible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .datasets import Interactions, SplitSpec, split_weak
from .ials import FactorModel, Hyperparams, half_sweep, objective, topk, train

__all__ = [
    "LoopConfig",
    "EpochRecord",
    "LoopTrajectory",
    "per_entity_recall",
    "run_feedback_loop",
    "write_trajectory_csv",
]


@dataclass(frozen=True)
class LoopConfig:
    epochs: int
    k: int = 50
    hp: Hyperparams = Hyperparams(d=16)
    initial_observed_fraction: float = 0.5
    seed: int = 0
    warm_start: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.k < 1:
            raise ValueError("K must be at least 1")
        if not 0.0 < self.initial_observed_fraction <= 1.0:
            raise ValueError("initial_observed_fraction must be in (0, 1]")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    user_recall_mean: float
    user_recall_median: float
    item_recall_mean: float
    item_recall_median: float
    new_pairs: int


@dataclass(frozen=True)
class LoopTrajectory:
    records: tuple

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))


def per_entity_recall(observed, truth, axis: str):
    """Per-user (or per-item) fraction of its ground-truth pairs that
    have been observed, for entities with at least one truth pair,
    ordered by entity id."""
    observed = frozenset(observed)
    truth = frozenset(truth)
    if not observed <= truth:
        raise ValueError("observed pairs must be a subset of the truth")
    if axis == "users":
        key = 0
    elif axis == "items":
        key = 1
    else:
        raise ValueError(f"axis must be 'users' or 'items', got {axis!r}")
    truth_counts: dict[int, int] = {}
    obs_counts: dict[int, int] = {}
    for pair in truth:
        truth_counts[pair[key]] = truth_counts.get(pair[key], 0) + 1
    for pair in observed:
        obs_counts[pair[key]] = obs_counts.get(pair[key], 0) + 1
    return [
        obs_counts.get(e, 0) / truth_counts[e] for e in sorted(truth_counts)
    ]


def _lower_median(values) -> float:
    ordered = sorted(values)
    if not ordered:
        raise ValueError("no values")
    return float(ordered[(len(ordered) - 1) // 2])


def _record(epoch: int, observed_pairs, truth_pairs, new_pairs: int) -> EpochRecord:
    ur = per_entity_recall(observed_pairs, truth_pairs, "users")
    ir = per_entity_recall(observed_pairs, truth_pairs, "items")
    return EpochRecord(
        epoch=epoch,
        user_recall_mean=float(np.mean(ur)),
        user_recall_median=_lower_median(ur),
        item_recall_mean=float(np.mean(ir)),
        item_recall_median=_lower_median(ir),
        new_pairs=new_pairs,
    )


def _retrain(observed: Interactions, cfg: LoopConfig, prev: FactorModel | None, threads: int):
    if not cfg.warm_start or prev is None:
        model, _ = train(observed, cfg.hp, threads=threads)
        return model
    model = FactorModel(prev.user_factors, prev.item_factors, cfg.hp)
    for _ in range(cfg.hp.sweeps):
        model = half_sweep(model, observed, "users", threads=threads)
        model = half_sweep(model, observed, "items", threads=threads)
    objective(model, observed)  # surfaces non-finite states early
    return model


def run_feedback_loop(full: Interactions, cfg: LoopConfig, threads: int = 1) -> LoopTrajectory:
    """Simulate cfg.epochs rounds of train -> recommend -> observe.

    Epoch 0 is the initial observation split; each later record reports
    the observed set after absorbing that epoch's recommended-and-true
    pairs. Users whose hidden pairs are exhausted keep being scored and
    simply stop contributing observations.
    """
    if not full.pairs:
        raise ValueError("empty interaction data")
    spec = SplitSpec(
        mode="weak",
        observed_fraction=cfg.initial_observed_fraction,
        seed=cfg.seed,
    )
    observed, hidden = split_weak(full, spec)
    records = [_record(0, observed.pairs, full.pairs, 0)]

    model: FactorModel | None = None
    for epoch in range(1, cfg.epochs + 1):
        model = _retrain(observed, cfg, model, threads)
        discovered = set()
        by_user = observed.by_user()
        for u in range(full.n_users):
            exclude = by_user[u]
            k_eff = min(cfg.k, full.n_items - len(exclude))
            if k_eff < 1:
                continue
            for v in topk(model, u, k_eff, exclude=set(exclude)):
                if (u, v) in hidden:
                    discovered.add((u, v))
        hidden = hidden - discovered
        observed = Interactions(
            full.n_users, full.n_items, observed.pairs | discovered
        )
        records.append(_record(epoch, observed.pairs, full.pairs, len(discovered)))
    return LoopTrajectory(records=tuple(records))


_FIELDS = [
    "epoch",
    "user_recall_mean",
    "user_recall_median",
    "item_recall_mean",
    "item_recall_median",
    "new_pairs",
]


def write_trajectory_csv(traj: LoopTrajectory, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_FIELDS)
        for r in traj.records:
            writer.writerow(
                [
                    r.epoch,
                    repr(r.user_recall_mean),
                    repr(r.user_recall_median),
                    repr(r.item_recall_mean),
                    repr(r.item_recall_median),
                    r.new_pairs,
                ]
            )
