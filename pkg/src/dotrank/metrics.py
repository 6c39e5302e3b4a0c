"""Ranking quality, coverage, and popularity-concentration metrics over
per-user top-K lists.

The concentration metric follows the printed per-pair form

    -(2 ||c||_1 |V|^2)^{-1} * sum over ordered pairs (j, l) of |c_j - c_l|

where c counts how often each item appears across all lists. The sum is
evaluated with the sorted-prefix identity rather than the double loop,
and the value is negated so that larger means more evenly spread.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "TopKTable",
    "FrequencyVector",
    "recall_at_k",
    "arp_at_k",
    "coverage_at_k",
    "negative_gini_at_k",
    "negative_gini_at_k_exact",
    "write_metrics_report",
]


@dataclass(frozen=True)
class TopKTable:
    """Per-evaluated-user ranked item lists, each of length at most K."""

    k: int
    lists: tuple

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("K must be at least 1")
        lists = tuple(tuple(int(v) for v in lst) for lst in self.lists)
        for lst in lists:
            if len(lst) > self.k:
                raise ValueError(f"list of length {len(lst)} exceeds K={self.k}")
            if len(set(lst)) != len(lst):
                raise ValueError("list repeats an item")
            if any(v < 0 for v in lst):
                raise ValueError("negative item index")
        object.__setattr__(self, "lists", lists)

    def __len__(self):
        return len(self.lists)


@dataclass(frozen=True)
class FrequencyVector:
    """Non-negative per-item appearance counts c, padded to the catalog
    size."""

    c: tuple

    def __post_init__(self):
        c = tuple(int(v) for v in self.c)
        if any(v < 0 for v in c):
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "c", c)

    @classmethod
    def from_table(cls, table: TopKTable, n_items: int) -> "FrequencyVector":
        counts = [0] * n_items
        for lst in table.lists:
            for v in lst:
                if v >= n_items:
                    raise ValueError(f"item {v} outside catalog of {n_items}")
                counts[v] += 1
        out = cls(tuple(counts))
        assert sum(out.c) == sum(len(lst) for lst in table.lists)
        return out

    def total(self) -> int:
        return sum(self.c)


def recall_at_k(ranked, holdout, k: int, normalize: str = "min") -> float:
    """|top-k of ranked ∩ holdout| over min(k, |holdout|).

    normalize="k" divides by plain k instead, for protocols that do not
    cap the denominator at the holdout size.
    """
    holdout = frozenset(holdout)
    if not holdout:
        raise ValueError("holdout must be non-empty")
    if k < 1:
        raise ValueError("k must be at least 1")
    hits = sum(1 for v in list(ranked)[:k] if v in holdout)
    if normalize == "min":
        denom = min(k, len(holdout))
    elif normalize == "k":
        denom = k
    else:
        raise ValueError(f"unknown normalization {normalize!r}")
    return hits / denom


def arp_at_k(table: TopKTable, item_counts, relative: bool = True) -> float:
    """Average recommendation popularity: mean over users of the mean
    training popularity of their recommended items.

    Popularity is the item's relative frequency in training by default;
    relative=False uses raw counts.
    """
    if len(table) == 0:
        raise ValueError("empty table")
    counts = np.asarray(item_counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        raise ValueError("item counts sum to zero")
    pop = counts / total if relative else counts
    per_user = []
    for lst in table.lists:
        if not lst:
            raise ValueError("empty recommendation list")
        per_user.append(float(pop[list(lst)].mean()))
    return float(np.mean(per_user))


def coverage_at_k(table: TopKTable, n_items: int) -> float:
    """Fraction of the catalog recommended to at least one user."""
    if n_items < 1:
        raise ValueError("n_items must be at least 1")
    freq = FrequencyVector.from_table(table, n_items)
    return sum(1 for v in freq.c if v > 0) / n_items


def _ordered_pair_abs_sum(c_sorted):
    """sum over ordered pairs (j, l) of |c_j - c_l| given ascending c:
    each c_(k) appears with +1 against k smaller and -1 against
    n - 1 - k larger entries, giving weight (2k - n + 1); the unordered
    sum doubles."""
    n = len(c_sorted)
    return 2 * sum((2 * k - n + 1) * v for k, v in enumerate(c_sorted))


def negative_gini_at_k(freq: FrequencyVector, n_items: int) -> float:
    """Concentration of recommendations, negated so 0 is perfectly even
    and values near -1 mean a single item absorbs everything."""
    return float(negative_gini_at_k_exact(freq, n_items))


def negative_gini_at_k_exact(freq: FrequencyVector, n_items: int) -> Fraction:
    """Exact-rational variant on integer counts."""
    c = list(freq.c)
    if len(c) > n_items:
        raise ValueError(f"{len(c)} counts for a catalog of {n_items}")
    c = c + [0] * (n_items - len(c))
    norm1 = sum(c)
    if norm1 == 0:
        raise ValueError("all counts are zero")
    pair_sum = _ordered_pair_abs_sum(sorted(c))
    return -Fraction(pair_sum, 2 * norm1 * n_items**2)


def write_metrics_report(records, path, fmt: str | None = None) -> None:
    """Emit [{metric, K, value}, ...] as JSON (default) or CSV with one
    row per (metric, K). fmt=None infers from the path suffix."""
    records = [
        {"metric": str(r["metric"]), "K": int(r["K"]), "value": float(r["value"])}
        for r in records
    ]
    if fmt is None:
        fmt = "csv" if str(path).endswith(".csv") else "json"
    if fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(records, fh, indent=2, sort_keys=True)
            fh.write("\n")
    elif fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["metric", "K", "value"])
            writer.writeheader()
            writer.writerows(records)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
