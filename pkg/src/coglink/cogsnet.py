"""Event-driven edge weights with reinforcement and forgetting.

Every interaction lifts an edge weight to at least the reinforcement peak
``mu``; between interactions the weight decays under an exponential,
power-law, or linear forgetting profile with intensity ``lam``, and the edge
is dropped once the decayed weight falls below the cut-off ``theta``
(strictly: ``w < theta`` prunes, ``w == theta`` survives).  Surviving
weights therefore live in ``[theta, 1)``.

The decay intensity is usually derived from a lifetime ``L``: the time a
freshly reinforced edge at ``w = mu`` takes to decay exactly to ``theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .events import EventLog

__all__ = [
    "ForgettingKind",
    "CogParams",
    "EdgeState",
    "CogSnapshot",
    "forgetting",
    "lambda_from_lifetime",
    "decayed_weight",
    "weight_at",
    "apply_event",
    "replay",
    "neighbors_at",
]


class ForgettingKind(str, Enum):
    EXPONENTIAL = "exp"
    POWER = "pow"
    LINEAR = "lin"

    @classmethod
    def parse(cls, name: str) -> "ForgettingKind":
        key = name.strip().lower()
        aliases = {
            "exp": cls.EXPONENTIAL,
            "exponential": cls.EXPONENTIAL,
            "pow": cls.POWER,
            "power": cls.POWER,
            "lin": cls.LINEAR,
            "linear": cls.LINEAR,
        }
        if key not in aliases:
            raise ValueError(f"unknown forgetting kind {name!r}")
        return aliases[key]


def forgetting(kind: ForgettingKind, lam: float, dt: float) -> float:
    """Forgetting factor after ``dt`` seconds (additive term for linear)."""
    if dt < 0:
        raise ValueError("time delta must be non-negative")
    if kind is ForgettingKind.EXPONENTIAL:
        return math.exp(-lam * dt)
    if kind is ForgettingKind.POWER:
        return max(1.0, dt) ** (-lam)
    return -lam * dt


def lambda_from_lifetime(
    kind: ForgettingKind, lifetime: float, mu: float, theta: float
) -> float:
    """Decay intensity that brings a weight from ``mu`` to ``theta`` in ``lifetime`` s."""
    if lifetime <= 0:
        raise ValueError("lifetime must be positive")
    if not (0 < theta < mu):
        raise ValueError("need 0 < theta < mu")
    if kind is ForgettingKind.EXPONENTIAL:
        return math.log(mu / theta) / lifetime
    if kind is ForgettingKind.POWER:
        if lifetime <= 1.0:
            raise ValueError("power-law lifetime must exceed 1 second")
        return math.log(mu / theta) / math.log(lifetime)
    return (mu - theta) / lifetime


@dataclass(frozen=True)
class CogParams:
    """Reinforcement peak, cut-off threshold, decay intensity, decay kind."""

    mu: float
    theta: float
    lam: float
    kind: ForgettingKind

    def __post_init__(self) -> None:
        if not (0.0 < self.mu <= 1.0):
            raise ValueError("mu must be in (0, 1]")
        if not (0.0 < self.theta < self.mu):
            raise ValueError("theta must be in (0, mu)")
        if self.lam <= 0.0:
            raise ValueError("lam must be positive")
        if not isinstance(self.kind, ForgettingKind):
            object.__setattr__(self, "kind", ForgettingKind.parse(self.kind))

    @classmethod
    def from_lifetime(
        cls, kind: ForgettingKind | str, lifetime: float, mu: float, theta: float
    ) -> "CogParams":
        k = kind if isinstance(kind, ForgettingKind) else ForgettingKind.parse(kind)
        return cls(mu=mu, theta=theta, lam=lambda_from_lifetime(k, lifetime, mu, theta), kind=k)

    def lifetime(self) -> float:
        """Time for a weight at ``mu`` to decay exactly to ``theta``."""
        if self.kind is ForgettingKind.EXPONENTIAL:
            return math.log(self.mu / self.theta) / self.lam
        if self.kind is ForgettingKind.POWER:
            return (self.mu / self.theta) ** (1.0 / self.lam)
        return (self.mu - self.theta) / self.lam


class EdgeState(NamedTuple):
    """Weight written at the last interaction and its timestamp."""

    w_last: float
    t_last: int


def decayed_weight(state: EdgeState, params: CogParams, t: int) -> float:
    """Decayed weight at ``t`` with no cut-off applied (may undershoot theta)."""
    if t < state.t_last:
        raise ValueError("time must not run backward")
    dt = t - state.t_last
    if params.kind is ForgettingKind.LINEAR:
        return state.w_last + forgetting(params.kind, params.lam, dt)
    return state.w_last * forgetting(params.kind, params.lam, dt)


def weight_at(state: EdgeState, params: CogParams, t: int) -> float:
    """Decayed weight at ``t``; 0.0 once it falls below the cut-off."""
    w = decayed_weight(state, params, t)
    return 0.0 if w < params.theta else w


def apply_event(state: EdgeState | None, params: CogParams, t: int) -> EdgeState:
    """State after an interaction at ``t``.

    A fresh or fully forgotten edge restarts at ``mu``; otherwise the decayed
    weight ``d`` is reinforced to ``mu + d * (1 - mu)``.
    """
    if state is None:
        return EdgeState(params.mu, t)
    d = decayed_weight(state, params, t)
    if d < params.theta:
        return EdgeState(params.mu, t)
    return EdgeState(params.mu + d * (1.0 - params.mu), t)


@dataclass(frozen=True)
class CogSnapshot:
    """All surviving edge weights at one instant.

    ``adjacency`` maps dense pairs ``(u, v)`` with ``u < v`` to weights in
    ``[theta, 1)``; pruned edges are absent.
    """

    t: int
    adjacency: dict[tuple[int, int], float]

    def __len__(self) -> int:
        return len(self.adjacency)

    def weight(self, x: int, y: int) -> float:
        key = (x, y) if x < y else (y, x)
        return self.adjacency.get(key, 0.0)

    def neighbors(self, x: int) -> dict[int, float]:
        out: dict[int, float] = {}
        for (a, b), w in self.adjacency.items():
            if a == x:
                out[b] = w
            elif b == x:
                out[a] = w
        return out

    def to_lines(self) -> list[str]:
        lines = []
        for (a, b), w in sorted(self.adjacency.items()):
            lines.append(f"{a} {b} {w:.9f}")
        return lines


def neighbors_at(snapshot: CogSnapshot, x: int) -> dict[int, float]:
    """Surviving neighbors of ``x`` with their weights (empty for unknown nodes)."""
    return snapshot.neighbors(x)


# --- batch machinery -------------------------------------------------------
#
# The per-pair state recurrence does not depend on where window boundaries
# fall, so one pass over the sorted events yields the post-event weight of
# every event; snapshots and window evaluations then decay those weights to
# the query times in closed form.


def decay_array(w: np.ndarray, dt: np.ndarray, params: CogParams) -> np.ndarray:
    """Vectorized unpruned decay of weights ``w`` over elapsed seconds ``dt``."""
    if params.kind is ForgettingKind.EXPONENTIAL:
        return w * np.exp(-params.lam * dt)
    if params.kind is ForgettingKind.POWER:
        return w * np.maximum(1.0, dt) ** (-params.lam)
    return w - params.lam * dt


def event_weight_trajectory(
    codes: np.ndarray, t: np.ndarray, params: CogParams
) -> np.ndarray:
    """Post-event weight for each event of a time-sorted stream.

    ``codes`` packs each event's unordered pair into one integer; events with
    equal timestamps are applied in stream order with dt = 0.
    """
    m = len(codes)
    out = np.empty(m, dtype=np.float64)
    last: dict[int, tuple[float, int]] = {}
    mu = params.mu
    theta = params.theta
    lam = params.lam
    one_minus_mu = 1.0 - mu
    code_list = codes.tolist()
    t_list = t.tolist()
    if params.kind is ForgettingKind.EXPONENTIAL:
        exp = math.exp
        for i in range(m):
            c = code_list[i]
            ti = t_list[i]
            prev = last.get(c)
            if prev is None:
                w = mu
            else:
                d = prev[0] * exp(-lam * (ti - prev[1]))
                w = mu if d < theta else mu + d * one_minus_mu
            last[c] = (w, ti)
            out[i] = w
    elif params.kind is ForgettingKind.POWER:
        for i in range(m):
            c = code_list[i]
            ti = t_list[i]
            prev = last.get(c)
            if prev is None:
                w = mu
            else:
                dt = ti - prev[1]
                d = prev[0] * (dt if dt > 1.0 else 1.0) ** (-lam)
                w = mu if d < theta else mu + d * one_minus_mu
            last[c] = (w, ti)
            out[i] = w
    else:
        for i in range(m):
            c = code_list[i]
            ti = t_list[i]
            prev = last.get(c)
            if prev is None:
                w = mu
            else:
                d = prev[0] - lam * (ti - prev[1])
                w = mu if d < theta else mu + d * one_minus_mu
            last[c] = (w, ti)
            out[i] = w
    return out


def last_event_indices(codes: np.ndarray) -> np.ndarray:
    """Index of the final event of each distinct code (codes in stream order)."""
    m = len(codes)
    _, first_in_reversed = np.unique(codes[::-1], return_index=True)
    return np.sort(m - 1 - first_in_reversed)


def replay(log: EventLog, params: CogParams, until: int) -> CogSnapshot:
    """Weights at time ``until`` after streaming every event with ``t <= until``."""
    if log.n_events == 0:
        return CogSnapshot(t=until, adjacency={})
    if until < log.span[0]:
        raise ValueError("replay time precedes the first event")
    cut = int(np.searchsorted(log.t, until, side="right"))
    codes = log.pair_codes()[:cut]
    if cut == 0:
        return CogSnapshot(t=until, adjacency={})
    traj = event_weight_trajectory(codes, log.t[:cut], params)
    last = last_event_indices(codes)
    w = decay_array(traj[last], until - log.t[last], params)
    keep = ~(w < params.theta)
    n = log.n_nodes
    adjacency: dict[tuple[int, int], float] = {}
    for code, wv in zip(codes[last[keep]].tolist(), w[keep].tolist()):
        adjacency[(code // n, code % n)] = wv
    return CogSnapshot(t=until, adjacency=adjacency)
