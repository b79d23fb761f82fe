"""Release gate, one criterion per test_a<N> group.

A1/A2 fuzz the weight engine against per-pair recomputation, A3 checks the
lifetime boundary, A4 checks the rank-statistic AUC against the double loop,
A5 checks the mixing-weight degeneracies, and A9 includes a synthetic
determinism twin; those run everywhere.  Parts that need the benchmark logs
(A5-A9 on real data) skip with a reason when the files are absent; the
terminal summary prints one verdict line per criterion either way.
"""

from __future__ import annotations

import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from coglink.cogsnet import CogParams, apply_event, decayed_weight, replay, weight_at
from coglink.config import PRESETS, ExperimentConfig
from coglink.events import from_triples, ingest, stats
from coglink.harness import (
    alpha_sweep,
    enumerate_points,
    grid_search,
    write_grid_outputs,
)
from coglink.metrics import auc
from coglink.sampling import Split, edge_sampling
from coglink.scoring import METHODS, PairScorer, ScoreList

from _oracles import oracle_auc, oracle_replay
from conftest import data_dir, dataset_path, synthetic_log

DATASETS = ("eu_email", "highschool", "hypertext", "manufacturing", "office")
FACE_TO_FACE = ("office", "hypertext", "highschool")

_ENGINE_REPORT: dict | None = None


def engine_fuzz_report() -> dict:
    """Replay 1000 random streams under all three forgetting kinds and compare
    every surviving weight with an independent per-pair recomputation."""
    global _ENGINE_REPORT
    if _ENGINE_REPORT is not None:
        return _ENGINE_REPORT
    rng = np.random.default_rng(20260817)
    started = time.perf_counter()
    max_err = {"exp": 0.0, "pow": 0.0, "lin": 0.0}
    min_margin = float("inf")
    max_weight = 0.0
    checked = 0
    streams = 0
    for _ in range(1000):
        n_nodes = int(rng.integers(2, 7))
        n_events = int(rng.integers(1, 51))
        horizon = int(rng.integers(50, 2_000_000))
        triples = []
        for _ in range(n_events):
            a = int(rng.integers(0, n_nodes))
            b = int(rng.integers(0, n_nodes - 1))
            if b >= a:
                b += 1
            triples.append((a, b, int(rng.integers(0, horizon))))
        log = from_triples(triples)
        dense = list(zip(log.u.tolist(), log.v.tolist(), log.t.tolist()))
        t_max = int(log.t[-1])
        streams += 1
        for kind in ("exp", "pow", "lin"):
            theta = float(rng.uniform(0.05, 0.3))
            mu = float(rng.uniform(theta + 0.1, 0.95))
            lifetime = float(rng.uniform(10.0, 1e6))
            until = t_max + int(rng.integers(0, int(2 * lifetime)))
            params = CogParams.from_lifetime(kind, lifetime, mu, theta)
            snapshot = replay(log, params, until).adjacency
            expected = oracle_replay(dense, kind, mu, theta, params.lam, until)
            for key in set(snapshot) | set(expected):
                err = abs(snapshot.get(key, 0.0) - expected.get(key, 0.0))
                if err > max_err[kind]:
                    max_err[kind] = err
            for w in snapshot.values():
                checked += 1
                if w - theta < min_margin:
                    min_margin = w - theta
                if w > max_weight:
                    max_weight = w
    _ENGINE_REPORT = {
        "streams": streams,
        "elapsed": time.perf_counter() - started,
        "max_err": max_err,
        "weights_checked": checked,
        "min_margin": min_margin,
        "max_weight": max_weight,
    }
    return _ENGINE_REPORT


def test_a1_replay_matches_per_pair_recomputation():
    report = engine_fuzz_report()
    assert report["streams"] == 1000
    assert report["max_err"]["exp"] <= 1e-9
    assert report["max_err"]["pow"] <= 1e-9
    assert report["max_err"]["lin"] <= 1e-12
    assert report["elapsed"] < 10.0


def test_a2_surviving_weights_stay_in_band():
    report = engine_fuzz_report()
    assert report["weights_checked"] > 0
    # nonzero weights live in [theta, 1): never below the cut-off, never 1
    assert report["min_margin"] >= 0.0
    assert report["max_weight"] < 1.0


@pytest.mark.parametrize("kind", ["exp", "pow", "lin"])
def test_a3_single_event_decays_to_cutoff_at_lifetime(kind):
    lifetime = 10 * 86400
    params = CogParams.from_lifetime(kind, float(lifetime), 0.4, 0.1)
    state = apply_event(None, params, 0)
    assert state.w_last == 0.4
    assert weight_at(state, params, 0) == 0.4
    # the raw decayed value hits the cut-off exactly at the lifetime
    assert abs(decayed_weight(state, params, lifetime) - 0.1) <= 1e-9 * 0.1
    # an instant inside the lifetime the edge still survives
    assert weight_at(state, params, lifetime - 1) > 0.1
    # any instant past the lifetime the edge is pruned to zero
    for dt in (1, 3600, 86400, 50 * 86400):
        assert weight_at(state, params, lifetime + dt) == 0.0


def _score_case(pos_scores, neg_scores) -> tuple[ScoreList, Split]:
    positives = [(0, i + 1) for i in range(len(pos_scores))]
    negatives = [(1, len(pos_scores) + i + 2) for i in range(len(neg_scores))]
    entries = dict(zip(positives, pos_scores)) | dict(zip(negatives, neg_scores))
    items = sorted(entries.items(), key=lambda kv: (-kv[1], kv[0]))
    scores = ScoreList(
        pairs=tuple(p for p, _ in items),
        values=np.array([v for _, v in items], dtype=float),
    )
    carrier = from_triples([("a", "b", 1), ("c", "d", 2)])
    split = Split(
        kind="edge",
        training=carrier,
        positives=tuple(sorted(positives)),
        negatives=tuple(sorted(negatives)),
        seed=0,
    )
    return scores, split


def test_a4_auc_matches_double_loop_on_fuzzed_sets():
    rng = np.random.default_rng(20260404)
    for case in range(500):
        n_pos = int(rng.integers(1, 30))
        n_neg = int(rng.integers(1, 40))
        if case % 2:
            # coarse grid of values forces heavy tie structure
            levels = int(rng.integers(2, 12))
            pos = (rng.integers(0, levels, size=n_pos) / levels).tolist()
            neg = (rng.integers(0, levels, size=n_neg) / levels).tolist()
        else:
            pos = rng.normal(size=n_pos).tolist()
            neg = rng.normal(size=n_neg).tolist()
        scores, split = _score_case(pos, neg)
        assert auc(scores, split) == pytest.approx(oracle_auc(pos, neg), abs=1e-12)
    scores, split = _score_case([1.0, 0.9], [0.5, 0.4, 0.3])
    assert auc(scores, split) == 1.0
    scores, split = _score_case([0.7, 0.7], [0.7, 0.7])
    assert auc(scores, split) == 0.5


def _ranking(pairs, values) -> tuple:
    return tuple(p for p, _ in sorted(zip(pairs, values), key=lambda kv: (-kv[1], kv[0])))


def _assert_alpha_endpoints(log, interval_minutes: float, lifetime_hours: float) -> None:
    split = edge_sampling(log, fraction=0.1, seed=42)
    scorer = PairScorer(split.training, split.universe)
    vector_methods = [m for m in METHODS if METHODS[m].vector is not None]
    cfg = ExperimentConfig(
        dataset=Path("unused.txt"),
        name="endpoint",
        methods=vector_methods,
        interval_minutes=[interval_minutes],
        lifetime_hours=[lifetime_hours],
        mu=[0.5],
        theta=[0.1],
        forgetting=["exp"],
        aggregation=["sum"],
        alpha=[0.5],
    )
    for name in vector_methods:
        (point,) = enumerate_points(name, cfg)
        spec = point.to_spec(name)
        cog_neighbors = spec.cog if METHODS[name].cognitive_neighbors else None
        neighbor_rank = _ranking(scorer.pairs, scorer.neighbor_raw(cog_neighbors))
        vector_rank = _ranking(scorer.pairs, scorer.vector_raw(spec))
        assert scorer.score_list(replace(spec, alpha=0.0)).pairs == neighbor_rank, name
        assert scorer.score_list(replace(spec, alpha=1.0)).pairs == vector_rank, name


@pytest.mark.parametrize("source", ("synthetic",) + DATASETS)
def test_a5_alpha_endpoints_reduce_to_single_terms(source):
    if source == "synthetic":
        log = synthetic_log(seed=417, n_nodes=25, n_events=500)
        _assert_alpha_endpoints(log, interval_minutes=60.0, lifetime_hours=24.0)
        return
    log = ingest(dataset_path(source))
    preset = PRESETS[source]
    nonzero = [v for v in preset["interval_minutes"] if v > 0]
    lifetimes = preset["lifetime_hours"]
    _assert_alpha_endpoints(
        log,
        interval_minutes=float(nonzero[len(nonzero) // 2]),
        lifetime_hours=float(lifetimes[len(lifetimes) // 2]),
    )


TABLE_COUNTS = {
    "hypertext": (113, 2196, 20818, 5246),
    "manufacturing": (167, 3250, 82563, 57791),
    "eu_email": (142, 833, 47525, 26496),
    "office": (92, 755, 9827, 7104),
    "highschool": (327, 5818, 188508, 7375),
}


@pytest.mark.parametrize("name", DATASETS)
def test_a6_benchmark_log_counts_are_exact(name):
    log = ingest(dataset_path(name))
    s = stats(log)
    assert (s.nodes, s.edges, s.events, s.timestamps) == TABLE_COUNTS[name]


def _preset_cfg(name: str, path: Path, methods: list[str], **overrides) -> ExperimentConfig:
    preset = PRESETS[name]
    base = dict(
        dataset=path,
        name=name,
        sampling="edge",
        methods=methods,
        interval_minutes=[float(v) for v in preset["interval_minutes"]],
        lifetime_hours=[float(v) for v in preset["lifetime_hours"]],
        mu=list(preset["mu"]),
        theta=list(preset["theta"]),
        forgetting=list(preset["forgetting"]),
        aggregation=list(preset["aggregation"]),
        alpha=[0.5],
        fraction=0.1,
        seeds=[42, 43, 44, 45, 46],
        objective="avg_precision",
    )
    base.update(overrides)
    return ExperimentConfig(**base)


@pytest.mark.parametrize("name", ["office", "hypertext"])
def test_a7_memory_methods_match_plain_neighbor_precision(name):
    path = dataset_path(name)
    cfg = _preset_cfg(name, path, ["NS", "CNS", "CNSCV", "CNSCTV"])
    result = grid_search(cfg, log=ingest(path))
    metric = "avg_precision"
    baseline = result.best_point(metric, "NS").objective(metric)
    challengers = {
        m: result.best_point(metric, m).objective(metric)
        for m in ("CNS", "CNSCV", "CNSCTV")
        if m in result.best[metric]
    }
    assert challengers, "every memory-based method failed"
    best_name, best_value = max(challengers.items(), key=lambda kv: kv[1])
    margin = best_value - baseline
    print(f"{name}: best {best_name}={best_value:.4f} vs NS={baseline:.4f} "
          f"(margin {margin:+.4f})")
    assert best_value >= baseline


@pytest.mark.parametrize("name", ["manufacturing", "eu_email"])
def test_a7_plain_neighbor_auc_floor(name):
    path = dataset_path(name)
    cfg = _preset_cfg(name, path, ["NS"], objective="auc")
    result = grid_search(cfg, log=ingest(path))
    value = result.best_point("auc", "NS").mean.auc
    print(f"{name}: NS auc={value:.4f}")
    assert value >= 0.80


def test_a8_alpha_curve_peaks_strictly_inside(tmp_path):
    for name in FACE_TO_FACE:
        path = data_dir() / f"{name}.txt"
        if path.exists():
            break
    else:
        pytest.skip(
            f"no face-to-face benchmark log under {data_dir()} "
            "(see README, section Benchmark logs)"
        )
    log = ingest(path)
    grid_cfg = _preset_cfg(name, path, ["CNSCV"], output=tmp_path / "grid")
    write_grid_outputs(grid_cfg, grid_search(grid_cfg, log=log))
    sweep_cfg = _preset_cfg(
        name, path, ["CNSCV"], best_from=tmp_path / "grid", output=tmp_path / "sweep"
    )
    result = alpha_sweep(sweep_cfg, log=log)
    best = result.argmax["avg_precision"]["CNSCV"]
    print(f"{name}: avg_precision argmax at alpha={best.point.alpha}")
    assert 0.0 < best.point.alpha < 1.0


def _grid_bytes(cfg: ExperimentConfig, log, workers: int) -> dict[str, bytes]:
    result = grid_search(cfg, log=log, workers=workers)
    return {p.name: p.read_bytes() for p in write_grid_outputs(cfg, result)}


def test_a9_grid_outputs_are_deterministic(tmp_path):
    log = synthetic_log(seed=90, n_nodes=18, n_events=300)
    runs = []
    for label, workers in (("one", 1), ("two", 1), ("pool", 2)):
        cfg = ExperimentConfig(
            dataset=Path("unused.txt"),
            name="twin",
            methods=["NS", "CNSCV"],
            interval_minutes=[0.0, 60.0],
            lifetime_hours=[24.0],
            mu=[0.5],
            theta=[0.1],
            forgetting=["exp"],
            aggregation=["sum", "avg"],
            alpha=[0.5],
            fraction=0.15,
            seeds=[1, 2],
            output=tmp_path / label,
        )
        runs.append(_grid_bytes(cfg, log, workers))
    assert set(runs[0]) == {
        "grid_rows.csv", "grid_summary.csv", "best_params_auc.csv",
        "best_params_avg_precision.csv", "splits_manifest.json",
    }
    assert runs[0] == runs[1]  # identical rerun
    assert runs[0] == runs[2]  # worker count cannot leak into the bytes


def test_a9_office_grid_rerun_is_byte_identical(tmp_path):
    path = dataset_path("office")
    log = ingest(path)
    runs = []
    for label in ("first", "second"):
        cfg = _preset_cfg(
            "office", path, ["CNSCV"],
            interval_minutes=[60.0], lifetime_hours=[24.0], mu=[0.5],
            theta=[0.1], forgetting=["exp"], aggregation=["sum"],
            output=tmp_path / label,
        )
        runs.append(_grid_bytes(cfg, log, workers=None))
    assert runs[0] == runs[1]


def test_a9_office_full_grid_fits_runtime_budget():
    path = dataset_path("office")
    log = ingest(path)
    cfg = _preset_cfg("office", path, ["CNSCV"])
    started = time.perf_counter()
    result = grid_search(cfg, log=log, workers=4)
    elapsed = time.perf_counter() - started
    points = len(result.summaries)
    print(f"office CNSCV grid: {points} points in {elapsed:.1f}s")
    assert points == len(enumerate_points("CNSCV", cfg))
    assert elapsed < 600.0
