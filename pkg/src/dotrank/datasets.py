"""Implicit-feedback dataset ingestion, filtering, and splitting.

The pipeline is: load a ratings CSV and binarize it by a rating
threshold, optionally k-core filter, then split either by holding out
whole users (strong generalization) or by hiding part of each user's
interactions (weak generalization).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyDatasetError, ParseError

__all__ = [
    "RawRating",
    "Interactions",
    "SplitSpec",
    "EvalUser",
    "load_interactions",
    "filter_kcore",
    "split_strong",
    "split_weak",
    "write_split_manifest",
    "read_split_manifest",
]


@dataclass(frozen=True)
class RawRating:
    user_id: str
    item_id: str
    rating: float
    timestamp: int | None = None

    def __post_init__(self):
        if not self.user_id or not self.item_id:
            raise ValueError("user_id and item_id must be non-empty")
        if not math.isfinite(self.rating):
            raise ValueError(f"non-finite rating {self.rating!r}")


class Interactions:
    """An immutable binary user-item feedback matrix.

    Stores the distinct (user_index, item_index) pairs together with
    per-user and per-item interaction counts. Index spaces are dense:
    every index in [0, n_users) x [0, n_items) is addressable even if it
    has no pairs.
    """

    __slots__ = ("n_users", "n_items", "pairs", "user_counts", "item_counts", "_by_user")

    def __init__(self, n_users: int, n_items: int, pairs):
        if n_users < 0 or n_items < 0:
            raise ValueError("counts must be non-negative")
        pairs = frozenset((int(u), int(v)) for u, v in pairs)
        user_counts = np.zeros(n_users, dtype=np.int64)
        item_counts = np.zeros(n_items, dtype=np.int64)
        for u, v in pairs:
            if not (0 <= u < n_users and 0 <= v < n_items):
                raise ValueError(f"pair ({u}, {v}) out of range")
            user_counts[u] += 1
            item_counts[v] += 1
        user_counts.flags.writeable = False
        item_counts.flags.writeable = False
        self._set("n_users", n_users)
        self._set("n_items", n_items)
        self._set("pairs", pairs)
        self._set("user_counts", user_counts)
        self._set("item_counts", item_counts)
        self._set("_by_user", None)

    def _set(self, name, value):
        object.__setattr__(self, name, value)

    def __setattr__(self, name, value):
        raise AttributeError("Interactions is immutable")

    def __len__(self):
        return len(self.pairs)

    def __eq__(self, other):
        if not isinstance(other, Interactions):
            return NotImplemented
        return (
            self.n_users == other.n_users
            and self.n_items == other.n_items
            and self.pairs == other.pairs
        )

    def __hash__(self):
        return hash((self.n_users, self.n_items, self.pairs))

    def __repr__(self):
        return f"Interactions(n_users={self.n_users}, n_items={self.n_items}, |pairs|={len(self.pairs)})"

    def items_of_user(self, u: int) -> tuple[int, ...]:
        """Items of user ``u``, ascending."""
        return self.by_user()[u]

    def by_user(self) -> tuple[tuple[int, ...], ...]:
        """Per-user item tuples, each sorted ascending; cached."""
        cached = self._by_user
        if cached is None:
            buckets: list[list[int]] = [[] for _ in range(self.n_users)]
            for u, v in self.pairs:
                buckets[u].append(v)
            cached = tuple(tuple(sorted(b)) for b in buckets)
            self._set("_by_user", cached)
        return cached

    def to_csr(self, side: str = "users") -> tuple[np.ndarray, np.ndarray]:
        """Compressed (indptr, indices) arrays with ascending indices per row.

        side="users" yields one row per user listing item indices;
        side="items" the transpose.
        """
        if side == "users":
            n_rows, key = self.n_users, lambda p: p
        elif side == "items":
            n_rows, key = self.n_items, lambda p: (p[1], p[0])
        else:
            raise ValueError(f"unknown side {side!r}")
        ordered = sorted(key(p) for p in self.pairs)
        indptr = np.zeros(n_rows + 1, dtype=np.int64)
        indices = np.empty(len(ordered), dtype=np.int64)
        for k, (r, c) in enumerate(ordered):
            indptr[r + 1] += 1
            indices[k] = c
        np.cumsum(indptr, out=indptr)
        return indptr, indices


@dataclass(frozen=True)
class SplitSpec:
    """Parameters for strong (held-out users) or weak (hidden pairs) splits."""

    mode: str  # "strong" | "weak"
    held_out_user_fraction: float = 0.2
    fold_in_fraction: float = 0.8
    observed_fraction: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("strong", "weak"):
            raise ValueError(f"unknown split mode {self.mode!r}")
        for name in ("held_out_user_fraction", "fold_in_fraction", "observed_fraction"):
            f = getattr(self, name)
            if not 0.0 < f <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {f}")


@dataclass(frozen=True)
class EvalUser:
    """A held-out user with interactions partitioned for evaluation."""

    user: int
    fold_in: frozenset[int]
    holdout: frozenset[int]


def _parse_row(row: list[str], line_no: int) -> RawRating:
    if len(row) not in (3, 4):
        raise ParseError(line_no, f"expected 3 or 4 columns, got {len(row)}")
    user, item, rating = row[0].strip(), row[1].strip(), row[2].strip()
    try:
        value = float(rating)
    except ValueError:
        raise ParseError(line_no, f"bad rating {rating!r}") from None
    ts = None
    if len(row) == 4 and row[3].strip():
        try:
            ts = int(row[3])
        except ValueError:
            raise ParseError(line_no, f"bad timestamp {row[3]!r}") from None
    try:
        return RawRating(user, item, value, ts)
    except ValueError as exc:
        raise ParseError(line_no, str(exc)) from None


def load_interactions(
    path,
    keep_threshold: float | None = None,
    inclusive: bool = False,
) -> Interactions:
    """Read a ``user,item,rating[,timestamp]`` CSV and binarize it.

    Keeps pairs with rating strictly above ``keep_threshold`` (or at or
    above it when ``inclusive``); ``keep_threshold=None`` keeps every
    pair. Duplicate pairs collapse to one. User and item indices are
    assigned in order of first appearance among the kept rows, so the
    mapping is deterministic for a fixed file.
    """
    users: dict[str, int] = {}
    items: dict[str, int] = {}
    pairs: set[tuple[int, int]] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for line_no, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if line_no == 1 and _looks_like_header(row):
                continue
            r = _parse_row(row, line_no)
            if keep_threshold is not None:
                if inclusive:
                    if r.rating < keep_threshold:
                        continue
                elif r.rating <= keep_threshold:
                    continue
            u = users.setdefault(r.user_id, len(users))
            v = items.setdefault(r.item_id, len(items))
            pairs.add((u, v))
    if not pairs:
        raise EmptyDatasetError(f"no interactions survive threshold in {path}")
    return Interactions(len(users), len(items), pairs)


def _looks_like_header(row: list[str]) -> bool:
    if len(row) < 3:
        return True
    try:
        float(row[2])
    except ValueError:
        return True
    return False


def filter_kcore(x: Interactions, min_user: int, min_item: int) -> Interactions:
    """Iteratively drop users/items below the count thresholds.

    Removal repeats until a fixed point: dropping a user lowers item
    counts and vice versa. Surviving users and items are re-indexed
    compactly, preserving their relative order, so the result's counts
    all meet the thresholds. Thresholds are inclusive minima; to keep
    only entities with *more than* t interactions pass t + 1.
    """
    if min_user < 0 or min_item < 0:
        raise ValueError("thresholds must be non-negative")
    live_pairs = set(x.pairs)
    while True:
        ucnt: dict[int, int] = {}
        icnt: dict[int, int] = {}
        for u, v in live_pairs:
            ucnt[u] = ucnt.get(u, 0) + 1
            icnt[v] = icnt.get(v, 0) + 1
        bad_u = {u for u, c in ucnt.items() if c < min_user}
        bad_i = {v for v, c in icnt.items() if c < min_item}
        if not bad_u and not bad_i:
            break
        live_pairs = {(u, v) for u, v in live_pairs if u not in bad_u and v not in bad_i}
    if not live_pairs:
        raise EmptyDatasetError("k-core filtering removed every pair")
    users = sorted({u for u, _ in live_pairs})
    items = sorted({v for _, v in live_pairs})
    umap = {u: k for k, u in enumerate(users)}
    imap = {v: k for k, v in enumerate(items)}
    return Interactions(
        len(users), len(items), {(umap[u], imap[v]) for u, v in live_pairs}
    )


def split_strong(
    x: Interactions, spec: SplitSpec
) -> tuple[Interactions, list[EvalUser]]:
    """Hold out whole users for strong-generalization evaluation.

    floor(held_out_user_fraction * n_users) users are sampled without
    replacement; their pairs are removed from the training set (index
    spaces are preserved). Each held-out user's items are shuffled and
    the first floor(fold_in_fraction * count) become fold-in, the rest
    holdout. Users with fewer than two items cannot be partitioned and
    are skipped (they stay out of training and out of the eval list).
    """
    if spec.mode != "strong":
        raise ValueError("split_strong requires mode='strong'")
    rng = np.random.default_rng(spec.seed)
    n_held = int(spec.held_out_user_fraction * x.n_users)
    held = set(rng.choice(x.n_users, size=n_held, replace=False).tolist())
    train_pairs = {(u, v) for u, v in x.pairs if u not in held}
    by_user = x.by_user()
    eval_users: list[EvalUser] = []
    for u in sorted(held):
        items = list(by_user[u])
        if len(items) < 2:
            continue
        perm = rng.permutation(len(items))
        n_fold = int(spec.fold_in_fraction * len(items))
        fold_in = frozenset(items[k] for k in perm[:n_fold])
        holdout = frozenset(items[k] for k in perm[n_fold:])
        eval_users.append(EvalUser(u, fold_in, holdout))
    if not train_pairs:
        raise EmptyDatasetError("strong split removed every training pair")
    return Interactions(x.n_users, x.n_items, train_pairs), eval_users


def split_weak(
    x: Interactions, spec: SplitSpec
) -> tuple[Interactions, frozenset[tuple[int, int]]]:
    """Hide part of each user's interactions for weak generalization.

    Per user, ceil(observed_fraction * count) pairs are kept observed;
    the remainder is hidden. Observed and hidden partition the input
    pairs exactly.
    """
    if spec.mode != "weak":
        raise ValueError("split_weak requires mode='weak'")
    rng = np.random.default_rng(spec.seed)
    observed: set[tuple[int, int]] = set()
    hidden: set[tuple[int, int]] = set()
    by_user = x.by_user()
    for u in range(x.n_users):
        items = list(by_user[u])
        if not items:
            continue
        n_obs = math.ceil(spec.observed_fraction * len(items))
        perm = rng.permutation(len(items))
        for k in perm[:n_obs]:
            observed.add((u, items[k]))
        for k in perm[n_obs:]:
            hidden.add((u, items[k]))
    return Interactions(x.n_users, x.n_items, observed), frozenset(hidden)


def weak_eval_users(
    observed: Interactions, hidden: frozenset
) -> list[EvalUser]:
    """Evaluation records for a weak split: every user with at least one
    hidden pair, their observed items as fold-in and hidden as holdout."""
    hidden_by_user: dict[int, set[int]] = {}
    for u, v in hidden:
        hidden_by_user.setdefault(u, set()).add(v)
    by_user = observed.by_user()
    return [
        EvalUser(u, frozenset(by_user[u]), frozenset(items))
        for u, items in sorted(hidden_by_user.items())
    ]


def write_interactions_snapshot(x: Interactions, path) -> None:
    """Persist an interaction set losslessly, keeping the index space
    (including entities that currently have no pairs, which a raw CSV
    round-trip would renumber away)."""
    payload = {
        "format": "dotrank-interactions",
        "version": 1,
        "n_users": x.n_users,
        "n_items": x.n_items,
        "pairs": sorted([u, v] for u, v in x.pairs),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_interactions_snapshot(path) -> Interactions:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != "dotrank-interactions":
        raise ValueError(f"{path} is not an interactions snapshot")
    return Interactions(
        payload["n_users"],
        payload["n_items"],
        {(int(u), int(v)) for u, v in payload["pairs"]},
    )


def write_split_manifest(path, eval_users: list[EvalUser], mode: str) -> None:
    """Persist an evaluation set as JSON.

    mode records how the users relate to the trained model: "weak"
    users are training rows (fold_in = their training items), "strong"
    users were withheld entirely and must be folded in at eval time.
    """
    if mode not in ("strong", "weak"):
        raise ValueError(f"mode must be 'strong' or 'weak', got {mode!r}")
    payload = {
        "format": "dotrank-split",
        "version": 1,
        "mode": mode,
        "eval_users": [
            {
                "user": e.user,
                "fold_in": sorted(e.fold_in),
                "holdout": sorted(e.holdout),
            }
            for e in eval_users
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_split_manifest(path) -> tuple[str, list[EvalUser]]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != "dotrank-split":
        raise ValueError(f"{path} is not a split manifest")
    users = [
        EvalUser(e["user"], frozenset(e["fold_in"]), frozenset(e["holdout"]))
        for e in payload["eval_users"]
    ]
    return payload["mode"], users
