"""Ingestion and indexing of timestamped interaction logs."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

import numpy as np

logger = logging.getLogger(__name__)


class Event(NamedTuple):
    u: int
    v: int
    t: int


@dataclass(frozen=True)
class LogStats:
    nodes: int
    edges: int
    events: int
    timestamps: int

    def to_dict(self) -> dict[str, int]:
        return {
            "nodes": self.nodes,
            "edges": self.edges,
            "events": self.events,
            "timestamps": self.timestamps,
        }


@dataclass(frozen=True)
class EventLog:
    """Chronologically sorted undirected interaction events.

    Node labels are re-indexed to dense ids in order of first appearance in
    the time-sorted stream (stable for equal timestamps), so a log and its
    serialized round trip index identically.  Each event stores the dense
    pair with ``u < v``; ``labels[i]`` is the external label of id ``i``.
    """

    u: np.ndarray
    v: np.ndarray
    t: np.ndarray
    labels: tuple[str, ...]
    dropped_self_loops: int = 0

    def __post_init__(self) -> None:
        for arr in (self.u, self.v, self.t):
            arr.flags.writeable = False

    @property
    def n_events(self) -> int:
        return int(self.t.shape[0])

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def span(self) -> tuple[int, int]:
        if self.n_events == 0:
            raise ValueError("empty log has no time span")
        return int(self.t[0]), int(self.t[-1])

    @property
    def node_map(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def events(self) -> Iterator[Event]:
        for u, v, t in zip(self.u.tolist(), self.v.tolist(), self.t.tolist()):
            yield Event(u, v, t)

    def pair_codes(self) -> np.ndarray:
        """Each event's unordered pair packed as ``u * n_nodes + v``."""
        return self.u.astype(np.int64) * self.n_nodes + self.v

    def active_nodes(self) -> np.ndarray:
        return np.unique(np.concatenate([self.u, self.v]))

    def subset(self, mask: np.ndarray) -> "EventLog":
        """Same node universe, events filtered by a boolean mask (order kept)."""
        return EventLog(
            u=self.u[mask].copy(),
            v=self.v[mask].copy(),
            t=self.t[mask].copy(),
            labels=self.labels,
            dropped_self_loops=self.dropped_self_loops,
        )

    def to_lines(self) -> Iterator[str]:
        for u, v, t in zip(self.u.tolist(), self.v.tolist(), self.t.tolist()):
            yield f"{self.labels[u]} {self.labels[v]} {t}"

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in self.to_lines():
                fh.write(line + "\n")


def _assemble(records: list[tuple[str, str, int]], dropped: int) -> EventLog:
    if not records:
        raise ValueError("log contains no events")
    order = sorted(range(len(records)), key=lambda i: records[i][2])
    index: dict[str, int] = {}
    labels: list[str] = []
    m = len(records)
    u = np.empty(m, dtype=np.int32)
    v = np.empty(m, dtype=np.int32)
    t = np.empty(m, dtype=np.int64)
    for pos, i in enumerate(order):
        a, b, ts = records[i]
        for label in (a, b):
            if label not in index:
                index[label] = len(labels)
                labels.append(label)
        da, db = index[a], index[b]
        if da > db:
            da, db = db, da
        u[pos], v[pos], t[pos] = da, db, ts
    return EventLog(u=u, v=v, t=t, labels=tuple(labels), dropped_self_loops=dropped)


def from_triples(triples: Iterable[tuple[str | int, str | int, int]]) -> EventLog:
    """Build a log from in-memory ``(u, v, t)`` triples (labels may be any str/int)."""
    records: list[tuple[str, str, int]] = []
    dropped = 0
    for a, b, ts in triples:
        if str(a) == str(b):
            dropped += 1
            continue
        records.append((str(a), str(b), int(ts)))
    if dropped:
        logger.warning("dropped %d self-loop events", dropped)
    return _assemble(records, dropped)


def ingest(path: str | Path, fmt: str = "auto") -> EventLog:
    """Parse a ``u v t`` interaction file into an :class:`EventLog`.

    ``fmt`` is ``whitespace``, ``csv``, or ``auto`` (sniff a comma in the
    first data line).  Lines starting with ``#`` and blank lines are skipped.
    Every data line must have exactly three fields with an integer timestamp;
    self-loops are dropped with a counted warning.
    """
    if fmt not in ("auto", "whitespace", "csv"):
        raise ValueError(f"unknown format {fmt!r}")
    records: list[tuple[str, str, int]] = []
    dropped = 0
    sep: str | None = {"auto": None, "whitespace": None, "csv": ","}[fmt]
    sniffed = fmt != "auto"
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not sniffed:
                sep = "," if "," in line else None
                sniffed = True
            fields = line.split(sep) if sep else line.split()
            fields = [f.strip() for f in fields]
            if len(fields) != 3:
                raise ValueError(
                    f"{path}: line {lineno}: expected 3 fields, got {len(fields)}"
                )
            a, b, ts_text = fields
            try:
                ts = int(ts_text)
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: timestamp {ts_text!r} is not an integer"
                ) from None
            if a == b:
                dropped += 1
                continue
            records.append((a, b, ts))
    if dropped:
        logger.warning("%s: dropped %d self-loop events", path, dropped)
    return _assemble(records, dropped)


def stats(log: EventLog) -> LogStats:
    """Node/edge/event/timestamp counts over the events actually present."""
    if log.n_events == 0:
        return LogStats(0, 0, 0, 0)
    return LogStats(
        nodes=int(log.active_nodes().shape[0]),
        edges=int(np.unique(log.pair_codes()).shape[0]),
        events=log.n_events,
        timestamps=int(np.unique(log.t).shape[0]),
    )
