"""Train/test splits for link prediction over one interaction log.

Three protocols:

* edge: repeatedly pick a uniformly random remaining event and remove every
  event of its pair, until at least ``fraction`` of the events are gone; the
  removed pairs are the positives;
* event: remove a uniformly random ``fraction`` of the events; pairs left
  with zero training events are the positives;
* future: five chronological groups of (nearly) equal event count; fold ``i``
  trains on groups 1..i and tests on group ``i+1``.

Candidates are restricted to nodes active in training.  Negatives are the
candidate pairs with no events anywhere in the full log, so positives and
negatives partition the scored universe exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .events import EventLog

Pair = tuple[int, int]


@dataclass(frozen=True)
class Split:
    """One training log with its positive and negative candidate pairs."""

    kind: str
    training: EventLog
    positives: tuple[Pair, ...]
    negatives: tuple[Pair, ...]
    seed: int | None = None
    fold: int | None = None
    excluded_cold_pairs: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("edge", "event", "future"):
            raise ValueError(f"unknown split kind {self.kind!r}")

    @property
    def universe(self) -> tuple[Pair, ...]:
        return tuple(sorted(self.positives + self.negatives))

    @property
    def positive_set(self) -> frozenset[Pair]:
        return frozenset(self.positives)

    def manifest(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "fold": self.fold,
            "training_events": self.training.n_events,
            "positives": len(self.positives),
            "negatives": len(self.negatives),
            "excluded_cold_pairs": self.excluded_cold_pairs,
        }


def _decode(codes: np.ndarray, n: int) -> list[Pair]:
    return [(int(c) // n, int(c) % n) for c in codes.tolist()]


def _candidate_codes(active: np.ndarray, n: int) -> np.ndarray:
    """Codes of all unordered pairs of active nodes, ascending."""
    i, j = np.triu_indices(len(active), k=1)
    return active[i].astype(np.int64) * n + active[j]


def _negatives(training: EventLog, full: EventLog) -> tuple[np.ndarray, np.ndarray]:
    """(active-node pair codes, never-connected subset) for a training log."""
    n = full.n_nodes
    active = training.active_nodes()
    candidates = _candidate_codes(active, n)
    ever = np.unique(full.pair_codes())
    never = candidates[~np.isin(candidates, ever)]
    return candidates, never


def _finish(
    kind: str,
    full: EventLog,
    training: EventLog,
    removed_codes: np.ndarray,
    seed: int | None,
    fold: int | None,
) -> Split:
    if training.n_events == 0:
        raise ValueError("sampling removed every training event")
    n = full.n_nodes
    active = training.active_nodes()
    active_set = set(active.tolist())
    positives = []
    cold = 0
    for x, y in _decode(np.unique(removed_codes), n):
        if x in active_set and y in active_set:
            positives.append((x, y))
        else:
            cold += 1
    _, never = _negatives(training, full)
    return Split(
        kind=kind,
        training=training,
        positives=tuple(sorted(positives)),
        negatives=tuple(sorted(_decode(never, n))),
        seed=seed,
        fold=fold,
        excluded_cold_pairs=cold,
    )


def edge_sampling(log: EventLog, fraction: float = 0.1, seed: int = 0) -> Split:
    """Remove whole pairs, picked through uniformly random events, until at
    least ``fraction`` of the events are gone."""
    if not (0.0 < fraction < 1.0):
        raise ValueError("fraction must be in (0, 1)")
    m = log.n_events
    codes = log.pair_codes()
    if np.unique(codes).shape[0] < 2:
        raise ValueError("log needs at least two distinct pairs to sample from")
    rng = np.random.default_rng(seed)
    alive = np.ones(m, dtype=bool)
    removed_codes: list[int] = []
    removed = 0
    threshold = fraction * m
    while removed < threshold:
        alive_idx = np.flatnonzero(alive)
        if alive_idx.shape[0] == 0:
            raise ValueError("sampling removed every training event")
        pick = int(alive_idx[rng.integers(alive_idx.shape[0])])
        code = codes[pick]
        members = alive & (codes == code)
        removed += int(members.sum())
        alive &= ~members
        removed_codes.append(int(code))
    training = log.subset(alive)
    return _finish("edge", log, training, np.array(removed_codes, dtype=np.int64), seed, None)


def event_sampling(log: EventLog, fraction: float = 0.1, seed: int = 0) -> Split:
    """Remove a uniformly random ``fraction`` of the events; pairs losing all
    their events become the positives."""
    if not (0.0 < fraction < 1.0):
        raise ValueError("fraction must be in (0, 1)")
    m = log.n_events
    k = max(1, int(np.floor(fraction * m + 0.5)))
    if k >= m:
        raise ValueError("sampling removed every training event")
    rng = np.random.default_rng(seed)
    removed_idx = rng.choice(m, size=k, replace=False)
    alive = np.ones(m, dtype=bool)
    alive[removed_idx] = False
    codes = log.pair_codes()
    training = log.subset(alive)
    gone = np.setdiff1d(np.unique(codes[~alive]), np.unique(codes[alive]))
    return _finish("event", log, training, gone, seed, None)


def future_folds(log: EventLog, k: int = 5) -> list[Split]:
    """Chronological folds: split into ``k`` groups of equal event count
    (boundary timestamp ties stay in the earlier group), train on groups
    1..i, test on group i+1, for i = 1..k-1."""
    if k < 2:
        raise ValueError("need at least two groups")
    m = log.n_events
    t = log.t
    cuts = [0]
    for i in range(1, k):
        cut = round(i * m / k)
        cut = max(cut, cuts[-1] + 1)
        while 0 < cut < m and t[cut - 1] == t[cut]:
            cut += 1
        cuts.append(cut)
    cuts.append(m)
    if any(b - a <= 0 for a, b in zip(cuts, cuts[1:])):
        raise ValueError(f"cannot form {k} non-empty chronological groups")
    n = log.n_nodes
    codes = log.pair_codes()
    splits = []
    for i in range(1, k):
        train_end = cuts[i]
        test_end = cuts[i + 1]
        mask = np.zeros(m, dtype=bool)
        mask[:train_end] = True
        training = log.subset(mask)
        active = set(training.active_nodes().tolist())
        train_codes = set(np.unique(codes[:train_end]).tolist())
        test_codes = np.unique(codes[train_end:test_end])
        positives = []
        cold = 0
        for x, y in _decode(test_codes, n):
            code = x * n + y
            if code in train_codes:
                continue
            if x in active and y in active:
                positives.append((x, y))
            else:
                cold += 1
        _, never = _negatives(training, log)
        splits.append(
            Split(
                kind="future",
                training=training,
                positives=tuple(sorted(positives)),
                negatives=tuple(sorted(_decode(never, n))),
                seed=None,
                fold=i,
                excluded_cold_pairs=cold,
            )
        )
    return splits
