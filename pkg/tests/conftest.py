"""Shared fixtures plus a terminal summary line per acceptance criterion."""

from __future__ import annotations

import os
import re
from pathlib import Path

import numpy as np
import pytest

from coglink import from_triples

_CRITERION = re.compile(r"test_acceptance\.py::test_a(\d+)")


def data_dir() -> Path:
    env = os.environ.get("COGLINK_DATA_DIR", "").strip()
    if env:
        return Path(env)
    return Path(__file__).resolve().parent.parent / "data"


def dataset_path(name: str) -> Path:
    """Path of a benchmark log, skipping the test when it is not present."""
    path = data_dir() / f"{name}.txt"
    if not path.exists():
        pytest.skip(
            f"benchmark log {name}.txt not present under {data_dir()} "
            "(see README, section Benchmark logs)"
        )
    return path


@pytest.fixture
def toy_log():
    # two pairs, one shared node, distinct timestamps
    return from_triples([("a", "b", 10), ("b", "c", 20), ("a", "b", 40)])


def synthetic_log(seed: int = 0, n_nodes: int = 30, n_events: int = 600,
                  max_gap: int = 900):
    """Heavy-tailed synthetic interaction log for protocol-level tests."""
    rng = np.random.default_rng(seed)
    triples = []
    t = 0
    for _ in range(n_events):
        t += int(rng.integers(1, max_gap))
        a = int(rng.zipf(1.8)) % n_nodes
        b = int(rng.zipf(1.8)) % n_nodes
        if a == b:
            b = (b + 1) % n_nodes
        triples.append((a, b, t))
    return from_triples(triples)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    counts: dict[int, dict[str, int]] = {}
    reasons: dict[int, str] = {}
    for status in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            match = _CRITERION.search(nodeid)
            if not match:
                continue
            crit = int(match.group(1))
            per = counts.setdefault(crit, {"passed": 0, "failed": 0, "skipped": 0})
            per["failed" if status == "error" else status] += 1
            if status == "skipped":
                longrepr = getattr(report, "longrepr", None)
                # skip reports carry (path, lineno, "Skipped: <reason>")
                text = str(longrepr[2] if isinstance(longrepr, tuple) else longrepr)
                reasons[crit] = text.removeprefix("Skipped: ").strip()[:100]
    if not counts:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for crit in sorted(counts):
        per = counts[crit]
        total = sum(per.values())
        if per["failed"]:
            verdict = "FAIL"
        elif per["passed"] == 0:
            verdict = f"SKIP ({reasons.get(crit, 'precondition not met')})"
        elif per["skipped"]:
            verdict = (
                f"PASS ({per['skipped']} of {total} parts skipped: "
                f"{reasons.get(crit, 'precondition not met')})"
            )
        else:
            verdict = "PASS"
        terminalreporter.write_line(f"A{crit}: {verdict}")
