"""Ranking-based cross-lingual consistency.

Two prediction rankings over the same label set are compared through the
precision of their top-j sets for every j, combined with exponentially
decaying weights (softmax of |Y|-j over j, natural base). The corpus score
is the mean of the per-example values.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import ValidationError


def rank_weights(y_count: int) -> np.ndarray:
    """Weights w_j = e^(|Y|-j) / sum_k e^(|Y|-k) for j = 1..|Y|.

    Strictly decreasing and summing to one.
    """
    if y_count < 1:
        raise ValidationError("label-set size must be at least 1")
    exps = np.exp(np.arange(y_count - 1, -1, -1, dtype=np.float64))
    return exps / exps.sum()


def _check_ranking(labels: Sequence[str]) -> tuple[str, ...]:
    ranking = tuple(labels)
    if not ranking:
        raise ValidationError("ranking must be non-empty")
    if len(set(ranking)) != len(ranking):
        raise ValidationError(f"ranking contains duplicates: {ranking}")
    return ranking


def precision_at_j(a: Sequence[str], b: Sequence[str], j: int) -> float:
    """Top-j set intersection size over j."""
    a, b = _check_ranking(a), _check_ranking(b)
    if not 1 <= j <= len(a):
        raise ValidationError(f"j must lie in [1, {len(a)}], got {j}")
    return len(set(a[:j]) & set(b[:j])) / j


def consistency(a: Sequence[str], b: Sequence[str]) -> float:
    """Weighted average of P@j across all ranks; 1.0 iff the rankings match."""
    a, b = _check_ranking(a), _check_ranking(b)
    if set(a) != set(b):
        raise ValidationError(f"rankings cover different label sets: {a} vs {b}")
    weights = rank_weights(len(a))
    return float(sum(
        weights[j - 1] * precision_at_j(a, b, j) for j in range(1, len(a) + 1)
    ))


def rankc(pairs: Sequence[tuple[Sequence[str], Sequence[str]]]) -> float:
    """Mean per-example consistency over aligned ranking pairs."""
    if not pairs:
        raise ValidationError("need at least one ranking pair")
    return sum(consistency(a, b) for a, b in pairs) / len(pairs)
