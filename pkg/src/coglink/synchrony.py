"""Per-node activity vectors over a shared window grid, and their cosine.

Two vector kinds over the same grid of ``k`` windows:

* temporal: entry ``i`` counts the distinct neighbors a node interacted
  with inside window ``i``;
* cognitive: entry ``i`` aggregates (sum or average) the decayed edge
  weights, evaluated at the window's end, of the neighbors active with the
  node inside window ``i``.

Windows are ``(T_{i-1}, T_i]``: half-open on the left, closed on the right,
with the stream start included in window 1.  ``interval == 0`` means one
window per training event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .cogsnet import CogParams, decay_array, event_weight_trajectory
from .events import EventLog

AGGREGATIONS = ("sum", "avg")


@dataclass(frozen=True)
class WindowGrid:
    """Shared window layout: start, width in seconds (0 = per event), count."""

    t0: int
    interval: int
    k: int

    def __post_init__(self) -> None:
        if self.interval < 0:
            raise ValueError("interval must be >= 0")
        if self.k <= 0:
            raise ValueError("need at least one window")

    @classmethod
    def covering(cls, log: EventLog, interval: int) -> "WindowGrid":
        """Smallest grid over the log's span (per-event windows for 0)."""
        t0, t_end = log.span
        if interval == 0:
            return cls(t0=t0, interval=0, k=log.n_events)
        k = max(1, math.ceil((t_end - t0) / interval))
        return cls(t0=t0, interval=interval, k=k)


def _window_index(t: np.ndarray, grid: WindowGrid) -> np.ndarray:
    """Window of each timestamp under the closed-right convention."""
    d = t.astype(np.int64) - grid.t0
    if np.any(d < 0):
        raise ValueError("event precedes the window grid")
    idx = np.where(d == 0, 0, (d + grid.interval - 1) // grid.interval - 1)
    if np.any(idx >= grid.k):
        raise ValueError("event beyond the window grid")
    return idx


def _window_ends(grid: WindowGrid, t_eval: int | None) -> np.ndarray:
    ends = grid.t0 + grid.interval * np.arange(1, grid.k + 1, dtype=np.int64)
    if t_eval is not None:
        ends = np.minimum(ends, t_eval)
    return ends


def temporal_matrix(training: EventLog, grid: WindowGrid) -> sp.csr_matrix:
    """Distinct-active-neighbor counts, nodes x windows (all labels as rows)."""
    n = training.n_nodes
    if training.n_events == 0:
        return sp.csr_matrix((n, grid.k), dtype=np.float64)
    if grid.interval == 0:
        if grid.k != training.n_events:
            raise ValueError("per-event grid must have one window per event")
        widx = np.arange(training.n_events, dtype=np.int64)
        rows = np.concatenate([training.u, training.v])
        cols = np.concatenate([widx, widx])
        data = np.ones(rows.shape[0], dtype=np.float64)
        return sp.csr_matrix((data, (rows, cols)), shape=(n, grid.k))
    widx = _window_index(training.t, grid)
    # one row per (node, neighbor, window); distinct neighbors = unique rows
    stacked = np.stack(
        [
            np.concatenate([training.u, training.v]),
            np.concatenate([training.v, training.u]),
            np.concatenate([widx, widx]),
        ],
        axis=1,
    )
    uniq = np.unique(stacked, axis=0)
    pairs, counts = np.unique(uniq[:, [0, 2]], axis=0, return_counts=True)
    return sp.csr_matrix(
        (counts.astype(np.float64), (pairs[:, 0], pairs[:, 1])), shape=(n, grid.k)
    )


def _same_timestamp_run_ends(codes: np.ndarray, t: np.ndarray) -> np.ndarray:
    """For each event, the last event index of its pair sharing its timestamp."""
    m = len(codes)
    by_pair = np.argsort(codes, kind="stable")  # stable keeps time order inside a pair
    c_sorted = codes[by_pair]
    t_sorted = t[by_pair]
    boundary = np.empty(m, dtype=bool)
    boundary[-1] = True
    boundary[:-1] = (c_sorted[1:] != c_sorted[:-1]) | (t_sorted[1:] != t_sorted[:-1])
    run_end_positions = np.flatnonzero(boundary)
    pos = np.arange(m)
    end_of = run_end_positions[np.searchsorted(run_end_positions, pos, side="left")]
    out = np.empty(m, dtype=np.int64)
    out[by_pair] = by_pair[end_of]
    return out


def cognitive_matrices(
    training: EventLog,
    grid: WindowGrid,
    params: CogParams,
    t_eval: int | None = None,
) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Sum- and avg-aggregated memory-weight vectors, nodes x windows.

    For each node and window, aggregates the decayed weights (evaluated at
    the window end, clamped to ``t_eval`` if given) of the neighbors active
    with it in that window; averaging divides by the count of those
    neighbors, and a window with no activity contributes zero either way.
    """
    n = training.n_nodes
    if training.n_events == 0:
        empty = sp.csr_matrix((n, grid.k), dtype=np.float64)
        return empty, empty.copy()
    codes = training.pair_codes()
    traj = event_weight_trajectory(codes, training.t, params)
    if grid.interval == 0:
        if grid.k != training.n_events:
            raise ValueError("per-event grid must have one window per event")
        # weight at the window end includes later events of the same pair at
        # the same timestamp, so resolve each event to its same-t run end
        j_star = _same_timestamp_run_ends(codes, training.t)
        w = traj[j_star]
        widx = np.arange(training.n_events, dtype=np.int64)
        rows = np.concatenate([training.u, training.v])
        cols = np.concatenate([widx, widx])
        data = np.concatenate([w, w])
    else:
        widx = _window_index(training.t, grid)
        ends = _window_ends(grid, t_eval)
        # last event of each (pair, window) group carries the state to decay
        key = codes * grid.k + widx
        m = len(key)
        _, first_rev = np.unique(key[::-1], return_index=True)
        sel = m - 1 - first_rev
        sel_w = widx[sel]
        dt = ends[sel_w] - training.t[sel]
        if np.any(dt < 0):
            raise ValueError("evaluation time precedes events inside the grid")
        w = decay_array(traj[sel], dt, params)
        w = np.where(w < params.theta, 0.0, w)  # pruned edges contribute nothing
        su, sv = training.u[sel], training.v[sel]
        rows = np.concatenate([su, sv])
        cols = np.concatenate([sel_w, sel_w])
        data = np.concatenate([w, w])
    num = sp.coo_matrix((data, (rows, cols)), shape=(n, grid.k)).tocsr()
    den = sp.coo_matrix(
        (np.ones(rows.shape[0]), (rows, cols)), shape=(n, grid.k)
    ).tocsr()
    avg = num.copy()
    avg.data = num.data / den.data
    return num, avg


def build_temporal(training: EventLog, grid: WindowGrid, x: int) -> np.ndarray:
    """Temporal activity vector of node ``x`` (dense, length ``grid.k``)."""
    return np.asarray(temporal_matrix(training, grid)[x].todense()).ravel()


def build_cognitive(
    training: EventLog,
    grid: WindowGrid,
    params: CogParams,
    aggregation: str,
    x: int,
    t_eval: int | None = None,
) -> np.ndarray:
    """Cognitive activity vector of node ``x`` (dense, length ``grid.k``)."""
    if aggregation not in AGGREGATIONS:
        raise ValueError(f"unknown aggregation {aggregation!r}")
    num, avg = cognitive_matrices(training, grid, params, t_eval=t_eval)
    mat = num if aggregation == "sum" else avg
    return np.asarray(mat[x].todense()).ravel()


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; 0.0 when either vector is all zeros."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("vectors must have equal length")
    na = math.sqrt(float(a @ a))
    nb = math.sqrt(float(b @ b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b) / (na * nb)


def gram_cosine(matrix: sp.csr_matrix) -> np.ndarray:
    """Dense pairwise cosine of the matrix rows (zero rows give zeros)."""
    sq = np.asarray(matrix.multiply(matrix).sum(axis=1)).ravel()
    norms = np.sqrt(sq)
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    normalized = sp.diags(inv) @ matrix
    gram = (normalized @ normalized.T).toarray()
    return np.clip(gram, 0.0, 1.0)
