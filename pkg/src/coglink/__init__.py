"""Temporal link prediction from timestamped interaction logs.

Edge weights carry a memory of past interactions (reinforced on contact,
decaying between contacts, pruned below a cut-off); candidate pairs are
scored by weighted neighborhood overlap and by the cosine of per-window
activity vectors, and a harness benchmarks the method family over
edge-removal, event-removal, and chronological splits.
"""

from .cogsnet import (
    CogParams,
    CogSnapshot,
    EdgeState,
    ForgettingKind,
    apply_event,
    decayed_weight,
    forgetting,
    lambda_from_lifetime,
    neighbors_at,
    replay,
    weight_at,
)
from .events import Event, EventLog, LogStats, from_triples, ingest, stats
from .metrics import EvalResult, aggregate, auc, evaluate, precision_at, variance
from .sampling import Split, edge_sampling, event_sampling, future_folds
from .scoring import METHODS, MethodSpec, PairScorer, ScoreList, ccn, cn, score_pairs
from .synchrony import WindowGrid, build_cognitive, build_temporal, cosine

__version__ = "0.1.0"

__all__ = [
    "CogParams",
    "CogSnapshot",
    "EdgeState",
    "Event",
    "EventLog",
    "EvalResult",
    "ForgettingKind",
    "LogStats",
    "METHODS",
    "MethodSpec",
    "PairScorer",
    "ScoreList",
    "Split",
    "WindowGrid",
    "aggregate",
    "apply_event",
    "auc",
    "build_cognitive",
    "build_temporal",
    "ccn",
    "cn",
    "cosine",
    "decayed_weight",
    "edge_sampling",
    "evaluate",
    "event_sampling",
    "forgetting",
    "from_triples",
    "future_folds",
    "ingest",
    "lambda_from_lifetime",
    "neighbors_at",
    "precision_at",
    "replay",
    "score_pairs",
    "stats",
    "variance",
    "weight_at",
]
