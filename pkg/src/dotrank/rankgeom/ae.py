"""Monotone output activations never change an argsort.

For a linear read-out s = W q + b followed by an elementwise strictly
increasing activation f, the induced ranking of f(s) equals the ranking
of the plain affine scores [W | b] @ [q ; 1]. Softmax is covered too:
it is not elementwise, but exp(s_i)/Z shares the denominator across
items, so the order still agrees.
"""

from __future__ import annotations

import numpy as np

__all__ = ["ae_rank_equivalence"]

_ACTIVATIONS = {
    "identity": lambda s: s,
    "sigmoid": lambda s: 1.0 / (1.0 + np.exp(-s)),
    "softmax": lambda s: np.exp(s - s.max()) / np.exp(s - s.max()).sum(),
}


def _ranking(scores: np.ndarray) -> tuple[int, ...]:
    order = np.argsort(-scores, kind="stable")
    ranked = scores[order]
    if np.any(ranked[:-1] == ranked[1:]):
        raise ValueError("tied scores: ranking is not well defined")
    return tuple(int(i) for i in order)


def ae_rank_equivalence(weights, bias, q, activation="identity") -> bool:
    """Check that activation(W q + b) and [W | b] @ [q ; 1] rank items
    identically.

    activation is one of "identity", "sigmoid", "softmax", or any
    callable mapping a score vector to a score vector. Ties in either
    score vector raise ValueError rather than being silently broken.
    """
    w = np.asarray(weights, dtype=float)
    b = np.asarray(bias, dtype=float).reshape(-1)
    qv = np.asarray(q, dtype=float).reshape(-1)
    if w.ndim != 2:
        raise ValueError("weights must be a matrix")
    if w.shape[0] != b.shape[0]:
        raise ValueError("bias length must match the number of rows")
    if w.shape[1] != qv.shape[0]:
        raise ValueError("query length must match the number of columns")

    if callable(activation):
        f = activation
    else:
        try:
            f = _ACTIVATIONS[activation]
        except KeyError:
            raise ValueError(f"unknown activation {activation!r}") from None

    activated = np.asarray(f(w @ qv + b), dtype=float)
    affine = np.hstack([w, b[:, None]]) @ np.append(qv, 1.0)
    return _ranking(activated) == _ranking(affine)
