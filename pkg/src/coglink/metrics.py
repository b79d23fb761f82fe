"""Ranking quality of scored candidate pairs against a split's ground truth.

AUC is the exhaustive pairwise statistic (wins + half-ties over all
positive-negative comparisons), computed exactly through the midrank
identity; a sampled estimator is available behind a flag for very large
universes.  Precision@L takes the top ``L = round_half_up(|positives| * r)``
entries of the deterministic score order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .sampling import Split
from .scoring import ScoreList

DEFAULT_RATIOS: tuple[float, ...] = tuple(round(0.1 * i, 1) for i in range(1, 11))


@dataclass(frozen=True)
class EvalResult:
    auc: float
    precision: dict[float, float]
    avg_precision: float


def _split_scores(scores: ScoreList, split: Split) -> tuple[np.ndarray, np.ndarray]:
    pos = split.positive_set
    neg = frozenset(split.negatives)
    if not pos:
        raise ValueError("split has no positive pairs")
    if not neg:
        raise ValueError("split has no negative pairs")
    pos_vals, neg_vals = [], []
    for pair, value in zip(scores.pairs, scores.values.tolist()):
        if pair in pos:
            pos_vals.append(value)
        elif pair in neg:
            neg_vals.append(value)
    if len(pos_vals) != len(pos) or len(neg_vals) != len(neg):
        raise ValueError("scores do not cover the split's candidate universe")
    return np.asarray(pos_vals), np.asarray(neg_vals)


def auc(
    scores: ScoreList,
    split: Split,
    sampled: int | None = None,
    seed: int = 0,
) -> float:
    """Probability a random positive outranks a random negative (ties count half).

    ``sampled`` switches to a Monte Carlo estimate over that many comparisons.
    """
    pos_vals, neg_vals = _split_scores(scores, split)
    n_pos, n_neg = len(pos_vals), len(neg_vals)
    if sampled is not None:
        if sampled <= 0:
            raise ValueError("sample count must be positive")
        rng = np.random.default_rng(seed)
        p = pos_vals[rng.integers(n_pos, size=sampled)]
        q = neg_vals[rng.integers(n_neg, size=sampled)]
        return float((np.sum(p > q) + 0.5 * np.sum(p == q)) / sampled)
    ranks = rankdata(np.concatenate([pos_vals, neg_vals]))
    pos_rank_sum = float(ranks[:n_pos].sum())
    wins_plus_half_ties = pos_rank_sum - n_pos * (n_pos + 1) / 2.0
    return wins_plus_half_ties / (n_pos * n_neg)


def precision_at(scores: ScoreList, split: Split, ratio: float) -> float:
    """Fraction of positives in the top ``round_half_up(|positives| * ratio)``."""
    if ratio <= 0:
        raise ValueError("ratio must be positive")
    pos = split.positive_set
    if not pos:
        raise ValueError("split has no positive pairs")
    depth = int(math.floor(len(pos) * ratio + 0.5))
    depth = min(max(depth, 1), len(scores))
    hits = sum(1 for pair in scores.pairs[:depth] if pair in pos)
    return hits / depth


def evaluate(
    scores: ScoreList,
    split: Split,
    ratios: tuple[float, ...] = DEFAULT_RATIOS,
) -> EvalResult:
    """AUC plus precision at each ratio and their mean."""
    precision = {r: precision_at(scores, split, r) for r in ratios}
    mean = sum(precision.values()) / len(precision)
    return EvalResult(auc=auc(scores, split), precision=precision, avg_precision=mean)


def aggregate(results: list[EvalResult]) -> EvalResult:
    """Element-wise mean over runs (identical ratio grids required)."""
    if not results:
        raise ValueError("nothing to aggregate")
    keys = results[0].precision.keys()
    if any(r.precision.keys() != keys for r in results):
        raise ValueError("runs use different precision ratio grids")
    n = len(results)
    precision = {k: sum(r.precision[k] for r in results) / n for k in keys}
    return EvalResult(
        auc=sum(r.auc for r in results) / n,
        precision=precision,
        avg_precision=sum(r.avg_precision for r in results) / n,
    )


def variance(results: list[EvalResult], metric: str = "auc") -> float:
    """Population variance of one metric across runs."""
    if not results:
        raise ValueError("nothing to aggregate")
    if metric == "auc":
        vals = [r.auc for r in results]
    elif metric == "avg_precision":
        vals = [r.avg_precision for r in results]
    else:
        raise ValueError(f"unknown metric {metric!r}")
    mean = sum(vals) / len(vals)
    return sum((v - mean) ** 2 for v in vals) / len(vals)
