"""Experiment orchestration: grid search, parameter sweeps, method ranking.

Work is enumerated deterministically (methods in the configured order, then
forgetting kind, lifetime, mu, theta, interval, aggregation, alpha, then
splits), sliced into contiguous bundles, and evaluated either in-process or
on a process pool; results merge in enumeration order, so every output CSV
is byte-identical for any worker count.  Axes a method does not consume are
collapsed before enumeration, so no duplicate work is done (and parameters
that cannot affect a method cannot change its results).
"""

from __future__ import annotations

import itertools
import json
import os
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from .cogsnet import CogParams, ForgettingKind
from .config import ExperimentConfig
from .events import EventLog, ingest
from .metrics import DEFAULT_RATIOS, EvalResult, aggregate, evaluate, variance
from .sampling import Split, edge_sampling, event_sampling, future_folds
from .scoring import METHODS, MethodSpec, PairScorer

DEFAULT_SWEEP_ALPHAS = tuple(round(0.1 * i, 1) for i in range(0, 11))

PARAM_COLUMNS = (
    "forgetting",
    "lifetime_h",
    "mu",
    "theta",
    "interval_min",
    "aggregation",
    "alpha",
)


@dataclass(frozen=True)
class GridPoint:
    """One parameter combination; axes the method ignores stay None."""

    forgetting: str | None = None
    lifetime_hours: float | None = None
    mu: float | None = None
    theta: float | None = None
    interval_minutes: float | None = None
    aggregation: str | None = None
    alpha: float | None = None

    def to_spec(self, method: str) -> MethodSpec:
        cog = None
        if self.forgetting is not None:
            cog = CogParams.from_lifetime(
                ForgettingKind.parse(self.forgetting),
                self.lifetime_hours * 3600.0,
                self.mu,
                self.theta,
            )
        interval = None
        if self.interval_minutes is not None:
            interval = int(round(self.interval_minutes * 60))
        return MethodSpec(
            name=method,
            alpha=self.alpha if self.alpha is not None else 0.5,
            cog=cog,
            interval=interval,
            aggregation=self.aggregation,
        )

    def columns(self) -> dict[str, object]:
        return {
            "forgetting": self.forgetting,
            "lifetime_h": self.lifetime_hours,
            "mu": self.mu,
            "theta": self.theta,
            "interval_min": self.interval_minutes,
            "aggregation": self.aggregation,
            "alpha": self.alpha,
        }


def method_axes(method: str) -> dict[str, bool]:
    parts = METHODS[method]
    needs_cog = parts.cognitive_neighbors or parts.vector in ("cognitive", "concatenated")
    return {
        "cog": needs_cog,
        "vector": parts.vector is not None,
        "aggregation": parts.vector in ("cognitive", "concatenated"),
    }


def enumerate_points(method: str, cfg: ExperimentConfig) -> list[GridPoint]:
    """The method's deduplicated grid, in canonical axis order."""
    axes = method_axes(method)
    kinds: Sequence = [ForgettingKind.parse(k).value for k in cfg.forgetting] if axes["cog"] else [None]
    lifetimes: Sequence = cfg.lifetime_hours if axes["cog"] else [None]
    mus: Sequence = cfg.mu if axes["cog"] else [None]
    thetas: Sequence = cfg.theta if axes["cog"] else [None]
    intervals: Sequence = cfg.interval_minutes if axes["vector"] else [None]
    aggs: Sequence = cfg.aggregation if axes["aggregation"] else [None]
    alphas: Sequence = cfg.alpha if axes["vector"] else [None]
    seen: dict[GridPoint, None] = {}
    for kind, life, mu, theta, ivl, agg, alpha in itertools.product(
        kinds, lifetimes, mus, thetas, intervals, aggs, alphas
    ):
        point = GridPoint(
            forgetting=kind,
            lifetime_hours=float(life) if life is not None else None,
            mu=float(mu) if mu is not None else None,
            theta=float(theta) if theta is not None else None,
            interval_minutes=float(ivl) if ivl is not None else None,
            aggregation=agg,
            alpha=float(alpha) if alpha is not None else None,
        )
        seen.setdefault(point, None)
    return list(seen)


def make_splits(log: EventLog, cfg: ExperimentConfig) -> list[Split]:
    if cfg.sampling == "edge":
        return [edge_sampling(log, cfg.fraction, seed) for seed in cfg.seeds]
    if cfg.sampling == "event":
        return [event_sampling(log, cfg.fraction, seed) for seed in cfg.seeds]
    return future_folds(log, cfg.folds)


def split_label(split: Split) -> str:
    if split.kind == "future":
        return f"fold:{split.fold}"
    return f"seed:{split.seed}"


# --- parallel evaluation ---------------------------------------------------

_WORKER_SPLITS: list[Split] = []
_WORKER_SCORERS: dict[int, PairScorer] = {}

Task = tuple[int, str, GridPoint, int]  # (task id, method, point, split index)


def _init_worker(splits: list[Split]) -> None:
    global _WORKER_SPLITS, _WORKER_SCORERS
    _WORKER_SPLITS = splits
    _WORKER_SCORERS = {}


def _eval_task(method: str, point: GridPoint, split_idx: int) -> EvalResult:
    split = _WORKER_SPLITS[split_idx]
    scorer = _WORKER_SCORERS.get(split_idx)
    if scorer is None:
        scorer = PairScorer(split.training, split.universe)
        _WORKER_SCORERS[split_idx] = scorer
    spec = point.to_spec(method)
    return evaluate(scorer.score_list(spec), split)


def _eval_bundle(tasks: list[Task]) -> list[tuple[int, str, object]]:
    out: list[tuple[int, str, object]] = []
    for task_id, method, point, split_idx in tasks:
        try:
            out.append((task_id, "ok", _eval_task(method, point, split_idx)))
        except Exception as exc:  # recorded, not fatal, unless everything fails
            out.append((task_id, "error", f"{type(exc).__name__}: {exc}"))
    return out


def worker_count() -> int:
    env = os.environ.get("COGLINK_WORKERS", "").strip()
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("COGLINK_WORKERS must be >= 1")
        return n
    return os.cpu_count() or 1


def run_tasks(
    tasks: list[Task], splits: list[Split], workers: int | None = None
) -> list[tuple[int, str, object]]:
    """Evaluate tasks, returning (task id, status, payload) in task order."""
    if workers is None:
        workers = worker_count()
    if workers <= 1 or len(tasks) <= 1:
        _init_worker(splits)
        try:
            return _eval_bundle(tasks)
        finally:
            _init_worker([])
    from concurrent.futures import ProcessPoolExecutor

    n_bundles = min(len(tasks), workers * 4)
    bounds = np.linspace(0, len(tasks), n_bundles + 1).astype(int)
    bundles = [tasks[a:b] for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    merged: list[tuple[int, str, object]] = []
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(splits,)
    ) as pool:
        for chunk in pool.map(_eval_bundle, bundles):
            merged.extend(chunk)
    merged.sort(key=lambda item: item[0])
    return merged


# --- result assembly ---------------------------------------------------------


@dataclass(frozen=True)
class PointSummary:
    method: str
    point: GridPoint
    per_split: tuple[EvalResult, ...]
    mean: EvalResult
    auc_var: float
    avg_precision_var: float

    def objective(self, name: str) -> float:
        return self.mean.auc if name == "auc" else self.mean.avg_precision


@dataclass(frozen=True)
class GridSearchResult:
    dataset: str
    sampling: str
    splits: tuple[Split, ...]
    summaries: tuple[PointSummary, ...]
    best: dict[str, dict[str, PointSummary]]  # metric -> method -> argmax
    errors: tuple[tuple[str, GridPoint, str, str], ...]

    def best_point(self, metric: str, method: str) -> PointSummary:
        return self.best[metric][method]


def _argmax_by(summaries: Iterable[PointSummary], metric: str) -> dict[str, PointSummary]:
    best: dict[str, PointSummary] = {}
    for s in summaries:  # first-in-enumeration wins ties via strict >
        cur = best.get(s.method)
        if cur is None or s.objective(metric) > cur.objective(metric):
            best[s.method] = s
    return best


def _collect(
    splits: list[Split],
    work: list[tuple[str, GridPoint]],
    workers: int | None,
    progress: Callable[[str], None] | None = None,
) -> tuple[list[PointSummary], list[tuple[str, GridPoint, str, str]]]:
    tasks: list[Task] = []
    for i, (method, point) in enumerate(work):
        for j in range(len(splits)):
            tasks.append((i * len(splits) + j, method, point, j))
    started = time.monotonic()
    results = run_tasks(tasks, splits, workers)
    if progress:
        progress(f"{len(tasks)} evaluations in {time.monotonic() - started:.1f}s")
    summaries: list[PointSummary] = []
    errors: list[tuple[str, GridPoint, str, str]] = []
    for i, (method, point) in enumerate(work):
        per_split: list[EvalResult] = []
        failed = False
        for j in range(len(splits)):
            task_id, status, payload = results[i * len(splits) + j]
            assert task_id == i * len(splits) + j
            if status == "ok":
                per_split.append(payload)
            else:
                failed = True
                errors.append((method, point, split_label(splits[j]), str(payload)))
        if failed or not per_split:
            continue
        summaries.append(
            PointSummary(
                method=method,
                point=point,
                per_split=tuple(per_split),
                mean=aggregate(per_split),
                auc_var=variance(per_split, "auc"),
                avg_precision_var=variance(per_split, "avg_precision"),
            )
        )
    if not summaries:
        detail = f"; first error: {errors[0][3]}" if errors else ""
        raise RuntimeError(f"every grid point failed{detail}")
    return summaries, errors


def grid_search(
    cfg: ExperimentConfig,
    log: EventLog | None = None,
    workers: int | None = None,
    progress: Callable[[str], None] | None = None,
) -> GridSearchResult:
    """Evaluate every method's parameter grid and pick per-metric winners."""
    if log is None:
        log = ingest(cfg.dataset, cfg.fmt)
    splits = make_splits(log, cfg)
    work: list[tuple[str, GridPoint]] = []
    for method in cfg.methods:
        points = enumerate_points(method, cfg)
        if progress:
            progress(f"{method}: {len(points)} grid points x {len(splits)} splits")
        work.extend((method, p) for p in points)
    summaries, errors = _collect(splits, work, workers, progress)
    best = {metric: _argmax_by(summaries, metric) for metric in ("auc", "avg_precision")}
    return GridSearchResult(
        dataset=cfg.name,
        sampling=cfg.sampling,
        splits=tuple(splits),
        summaries=tuple(summaries),
        best=best,
        errors=tuple(errors),
    )


# --- sweeps ------------------------------------------------------------------


def _single_point(cfg: ExperimentConfig, method: str) -> GridPoint:
    points = enumerate_points(method, cfg)
    if len(points) != 1:
        raise ValueError(
            f"{method}: config must pin every axis to one value "
            f"(got {len(points)} grid points); use 'grid' to search"
        )
    return points[0]


def base_points(cfg: ExperimentConfig) -> dict[str, GridPoint]:
    """Starting point per method: the persisted best table, or the pinned config."""
    if cfg.best_from is not None:
        table = load_best_points(
            Path(cfg.best_from) / f"best_params_{cfg.objective}.csv"
        )
        missing = [m for m in cfg.methods if m not in table]
        if missing:
            raise ValueError(f"best table lacks methods: {', '.join(missing)}")
        return {m: table[m] for m in cfg.methods}
    return {m: _single_point(cfg, m) for m in cfg.methods}


@dataclass(frozen=True)
class SweepResult:
    dataset: str
    sampling: str
    axis: str
    splits: tuple[Split, ...]
    summaries: tuple[PointSummary, ...]
    argmax: dict[str, dict[str, PointSummary]]  # metric -> method -> best


def _sweep(
    cfg: ExperimentConfig,
    axis: str,
    values_for: Callable[[str], list],
    vary: Callable[[GridPoint, object], GridPoint],
    log: EventLog | None,
    workers: int | None,
    progress: Callable[[str], None] | None,
) -> SweepResult:
    if log is None:
        log = ingest(cfg.dataset, cfg.fmt)
    methods = [m for m in cfg.methods if METHODS[m].vector is not None]
    if not methods:
        raise ValueError(f"no configured method has a vector part to sweep {axis} over")
    # the swept axis is overridden per value below, so it need not be pinned
    pinned = replace(cfg, methods=methods)
    if axis == "alpha":
        pinned = replace(pinned, alpha=cfg.alpha[:1])
    else:
        pinned = replace(pinned, interval_minutes=cfg.interval_minutes[:1])
    bases = base_points(pinned)
    splits = make_splits(log, cfg)
    work: list[tuple[str, GridPoint]] = []
    for method in methods:
        for value in values_for(method):
            work.append((method, vary(bases[method], value)))
    summaries, errors = _collect(splits, work, workers, progress)
    if errors and progress:
        progress(f"{len(errors)} evaluations failed")
    argmax = {metric: _argmax_by(summaries, metric) for metric in ("auc", "avg_precision")}
    return SweepResult(
        dataset=cfg.name,
        sampling=cfg.sampling,
        axis=axis,
        splits=tuple(splits),
        summaries=tuple(summaries),
        argmax=argmax,
    )


def alpha_sweep(
    cfg: ExperimentConfig,
    log: EventLog | None = None,
    workers: int | None = None,
    progress: Callable[[str], None] | None = None,
) -> SweepResult:
    """Evaluate each vector method across the alpha grid (0..1 by default)."""
    alphas = [float(a) for a in cfg.alpha] if len(cfg.alpha) > 1 else list(DEFAULT_SWEEP_ALPHAS)
    return _sweep(
        cfg,
        "alpha",
        lambda method: alphas,
        lambda point, a: replace(point, alpha=float(a)),
        log,
        workers,
        progress,
    )


def interval_sweep(
    cfg: ExperimentConfig,
    log: EventLog | None = None,
    workers: int | None = None,
    progress: Callable[[str], None] | None = None,
) -> SweepResult:
    """Evaluate each vector method across the configured window intervals."""
    intervals = [float(i) for i in cfg.interval_minutes]
    return _sweep(
        cfg,
        "interval_min",
        lambda method: intervals,
        lambda point, ivl: replace(point, interval_minutes=float(ivl)),
        log,
        workers,
        progress,
    )


# --- ranking -------------------------------------------------------------------


def rank_methods(per_dataset: dict[str, dict[str, float]]) -> dict[str, dict[str, float]]:
    """Average rank of each method across datasets (rank 1 = best value,
    ties share the mean rank).  Returns {method: {dataset: rank, "avg": r}}."""
    datasets = sorted(per_dataset)
    if not datasets:
        raise ValueError("nothing to rank")
    methods = sorted(per_dataset[datasets[0]])
    for ds in datasets:
        if sorted(per_dataset[ds]) != methods:
            raise ValueError(f"dataset {ds!r} reports a different method set")
    if not methods:
        raise ValueError("nothing to rank")
    out: dict[str, dict[str, float]] = {m: {} for m in methods}
    for ds in datasets:
        values = np.array([per_dataset[ds][m] for m in methods], dtype=np.float64)
        ranks = rankdata(-values, method="average")
        for m, r in zip(methods, ranks):
            out[m][ds] = float(r)
    for m in methods:
        out[m]["avg"] = sum(out[m][ds] for ds in datasets) / len(datasets)
    return out


# --- CSV artifacts ----------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def _ratio_columns(ratios: Sequence[float] = DEFAULT_RATIOS) -> list[str]:
    return [f"p@{r:.1f}" for r in ratios]


def _result_cells(res: EvalResult) -> list[str]:
    cells = [_fmt(res.auc)]
    cells += [_fmt(res.precision[r]) for r in DEFAULT_RATIOS]
    cells.append(_fmt(res.avg_precision))
    return cells


def _write_csv(path: Path, header: list[str], rows: Iterable[list[str]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_rows_csv(
    path: Path, dataset: str, sampling: str, splits: Sequence[Split],
    summaries: Sequence[PointSummary],
) -> None:
    header = (
        ["dataset", "method", "sampling", *PARAM_COLUMNS, "split", "auc"]
        + _ratio_columns()
        + ["avg_precision"]
    )
    rows = []
    for s in summaries:
        params = [_fmt(v) for v in s.point.columns().values()]
        for split, res in zip(splits, s.per_split):
            rows.append(
                [dataset, s.method, sampling, *params, split_label(split)]
                + _result_cells(res)
            )
    _write_csv(path, header, rows)


def write_summary_csv(
    path: Path, dataset: str, sampling: str, summaries: Sequence[PointSummary]
) -> None:
    header = (
        ["dataset", "method", "sampling", *PARAM_COLUMNS, "splits", "auc_mean", "auc_var"]
        + [c + "_mean" for c in _ratio_columns()]
        + ["avg_precision_mean", "avg_precision_var"]
    )
    rows = []
    for s in summaries:
        params = [_fmt(v) for v in s.point.columns().values()]
        rows.append(
            [dataset, s.method, sampling, *params, str(len(s.per_split)),
             _fmt(s.mean.auc), _fmt(s.auc_var)]
            + [_fmt(s.mean.precision[r]) for r in DEFAULT_RATIOS]
            + [_fmt(s.mean.avg_precision), _fmt(s.avg_precision_var)]
        )
    _write_csv(path, header, rows)


def write_best_csv(path: Path, metric: str, best: dict[str, PointSummary],
                   methods: Sequence[str]) -> None:
    """Parameter-name rows by method columns, the layout of the report tables."""
    header = ["param"] + list(methods)
    display = {
        "interval_min": "interval_minutes",
        "lifetime_h": "lifetime_hours",
        "mu": "mu",
        "theta": "theta",
        "forgetting": "forgetting",
        "aggregation": "aggregation",
        "alpha": "alpha",
    }
    rows = []
    for key, label in display.items():
        row = [label]
        for m in methods:
            value = best[m].point.columns()[key] if m in best else None
            row.append(_fmt(value) if value is not None else "-")
        rows.append(row)
    score_row = [metric]
    for m in methods:
        score_row.append(_fmt(best[m].objective(metric)) if m in best else "-")
    rows.append(score_row)
    _write_csv(path, header, rows)


def load_best_points(path: str | Path) -> dict[str, GridPoint]:
    """Rebuild per-method grid points from a persisted best-parameter table."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    header = lines[0].split(",")
    if header[0] != "param":
        raise ValueError(f"{path}: not a best-parameter table")
    methods = header[1:]
    table: dict[str, dict[str, str]] = {m: {} for m in methods}
    for line in lines[1:]:
        cells = line.split(",")
        for m, cell in zip(methods, cells[1:]):
            table[m][cells[0]] = cell
    out: dict[str, GridPoint] = {}
    for m in methods:
        row = table[m]

        def pick(key: str, cast) -> object:
            cell = row.get(key, "-")
            return None if cell in ("-", "") else cast(cell)

        out[m] = GridPoint(
            forgetting=pick("forgetting", str),
            lifetime_hours=pick("lifetime_hours", float),
            mu=pick("mu", float),
            theta=pick("theta", float),
            interval_minutes=pick("interval_minutes", float),
            aggregation=pick("aggregation", str),
            alpha=pick("alpha", float),
        )
    return out


def write_manifest(path: Path, splits: Sequence[Split]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = [s.manifest() for s in splits]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_errors_csv(path: Path, errors: Sequence[tuple[str, GridPoint, str, str]]) -> None:
    header = ["method", *PARAM_COLUMNS, "split", "error"]
    rows = []
    for method, point, label, message in errors:
        params = [_fmt(v) for v in point.columns().values()]
        rows.append([method, *params, label, message.replace(",", ";")])
    _write_csv(path, header, rows)


def write_grid_outputs(cfg: ExperimentConfig, result: GridSearchResult) -> list[Path]:
    out = Path(cfg.output)
    written = []
    rows_path = out / "grid_rows.csv"
    write_rows_csv(rows_path, result.dataset, result.sampling, result.splits, result.summaries)
    written.append(rows_path)
    summary_path = out / "grid_summary.csv"
    write_summary_csv(summary_path, result.dataset, result.sampling, result.summaries)
    written.append(summary_path)
    for metric in ("auc", "avg_precision"):
        best_path = out / f"best_params_{metric}.csv"
        write_best_csv(best_path, metric, result.best[metric], cfg.methods)
        written.append(best_path)
    manifest_path = out / "splits_manifest.json"
    write_manifest(manifest_path, result.splits)
    written.append(manifest_path)
    if result.errors:
        errors_path = out / "grid_errors.csv"
        write_errors_csv(errors_path, result.errors)
        written.append(errors_path)
    return written


def write_sweep_outputs(cfg: ExperimentConfig, result: SweepResult) -> list[Path]:
    out = Path(cfg.output)
    written = []
    prefix = "alpha" if result.axis == "alpha" else "interval"
    rows_path = out / f"{prefix}_sweep_rows.csv"
    write_rows_csv(rows_path, result.dataset, result.sampling, result.splits, result.summaries)
    written.append(rows_path)
    summary_path = out / f"{prefix}_sweep_summary.csv"
    write_summary_csv(summary_path, result.dataset, result.sampling, result.summaries)
    written.append(summary_path)

    argmax_path = out / f"{prefix}_argmax.csv"
    header = ["metric", "method", result.axis, "value", "interior"]
    rows = []
    for metric in ("auc", "avg_precision"):
        for method in sorted(result.argmax[metric]):
            s = result.argmax[metric][method]
            axis_value = (
                s.point.alpha if result.axis == "alpha" else s.point.interval_minutes
            )
            swept = sorted(
                {
                    (p.point.alpha if result.axis == "alpha" else p.point.interval_minutes)
                    for p in result.summaries
                    if p.method == method
                }
            )
            interior = str(bool(swept[0] < axis_value < swept[-1])).lower()
            rows.append([metric, method, _fmt(axis_value), _fmt(s.objective(metric)), interior])
    _write_csv(argmax_path, header, rows)
    written.append(argmax_path)

    if result.axis == "interval_min":
        var_path = out / "interval_variance.csv"
        header = ["dataset", "sampling", "method", "metric", "mean", "variance"]
        rows = []
        for method in sorted({s.method for s in result.summaries}):
            for metric in ("auc", "avg_precision"):
                vals = [
                    s.objective(metric) for s in result.summaries if s.method == method
                ]
                mean = sum(vals) / len(vals)
                var = sum((v - mean) ** 2 for v in vals) / len(vals)
                rows.append(
                    [result.dataset, result.sampling, method, metric, _fmt(mean), _fmt(var)]
                )
        _write_csv(var_path, header, rows)
        written.append(var_path)

    manifest_path = out / "splits_manifest.json"
    write_manifest(manifest_path, result.splits)
    written.append(manifest_path)
    return written


def read_summary_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def rank_from_summaries(paths: Sequence[str | Path]) -> dict[str, dict[str, dict[str, dict[str, float]]]]:
    """Rank tables from persisted grid summaries.

    Returns {sampling: {metric: {method: {dataset: rank, "avg": r}}}}; the
    best grid point per (dataset, method) is re-derived from the summaries.
    """
    groups: dict[str, dict[str, dict[str, dict[str, float]]]] = {}
    metric_col = {"auc": "auc_mean", "avg_precision": "avg_precision_mean"}
    for path in paths:
        for row in read_summary_csv(path):
            sampling = row["sampling"]
            dataset = row["dataset"]
            method = row["method"]
            for metric, col in metric_col.items():
                value = float(row[col])
                bucket = groups.setdefault(sampling, {}).setdefault(metric, {})
                per_ds = bucket.setdefault(dataset, {})
                if method not in per_ds or value > per_ds[method]:
                    per_ds[method] = value
    out: dict[str, dict[str, dict[str, dict[str, float]]]] = {}
    for sampling, by_metric in sorted(groups.items()):
        out[sampling] = {}
        for metric, per_dataset in sorted(by_metric.items()):
            out[sampling][metric] = rank_methods(per_dataset)
    return out


def write_rank_csv(path: Path, ranks: dict[str, dict[str, dict[str, dict[str, float]]]]) -> None:
    header = ["sampling", "metric", "method", "dataset", "rank"]
    rows = []
    for sampling in sorted(ranks):
        for metric in sorted(ranks[sampling]):
            table = ranks[sampling][metric]
            for method in sorted(table):
                for dataset in sorted(k for k in table[method] if k != "avg"):
                    rows.append([sampling, metric, method, dataset, _fmt(table[method][dataset])])
                rows.append([sampling, metric, method, "avg", _fmt(table[method]["avg"])])
    _write_csv(path, header, rows)
