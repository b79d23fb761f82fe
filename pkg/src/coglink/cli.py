"""Command-line front end.

Subcommands: ``stats`` (log summary as JSON), ``run`` (evaluate pinned
method parameters), ``grid`` (parameter search), ``alpha-sweep`` and
``interval-sweep`` (one-axis sweeps from pinned or persisted-best
parameters), ``rank`` (average method ranks across persisted grid
summaries).  ``COGLINK_WORKERS`` caps evaluation processes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .config import parse_config
from .events import ingest, stats
from .scoring import dump_scores


def _progress(message: str) -> None:
    print(message, file=sys.stderr)


def _cmd_stats(args: argparse.Namespace) -> int:
    log = ingest(args.log, args.format)
    print(json.dumps(stats(log).to_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_grid(args: argparse.Namespace) -> int:
    cfg = parse_config(args.config)
    result = harness.grid_search(cfg, workers=args.workers, progress=_progress)
    written = harness.write_grid_outputs(cfg, result)
    for metric in ("auc", "avg_precision"):
        for method in cfg.methods:
            if method in result.best[metric]:
                best = result.best[metric][method]
                print(f"best {metric} {method}: {best.objective(metric):.4f}")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = parse_config(args.config)
    points = {m: harness.enumerate_points(m, cfg) for m in cfg.methods}
    for method, pts in points.items():
        if len(pts) != 1:
            raise ValueError(
                f"run needs every axis pinned to one value; {method} has "
                f"{len(pts)} grid points (use 'grid' to search)"
            )
    result = harness.grid_search(cfg, workers=args.workers, progress=_progress)
    out = Path(cfg.output)
    harness.write_rows_csv(out / "run_rows.csv", result.dataset, result.sampling,
                           result.splits, result.summaries)
    harness.write_summary_csv(out / "run_summary.csv", result.dataset,
                              result.sampling, result.summaries)
    harness.write_manifest(out / "splits_manifest.json", result.splits)
    if result.errors:
        harness.write_errors_csv(out / "run_errors.csv", result.errors)
    if args.dump_scores:
        from .scoring import PairScorer

        for i, split in enumerate(result.splits):
            scorer = PairScorer(split.training, split.universe)
            for s in result.summaries:
                label = harness.split_label(split).replace(":", "")
                path = out / f"scores_{s.method}_{label}.csv"
                dump_scores(scorer.score_list(s.point.to_spec(s.method)), path)
    for s in result.summaries:
        print(f"{s.method}: auc={s.mean.auc:.4f} avg_precision={s.mean.avg_precision:.4f}")
    print(f"wrote {out / 'run_rows.csv'}")
    print(f"wrote {out / 'run_summary.csv'}")
    return 0


def _cmd_alpha_sweep(args: argparse.Namespace) -> int:
    cfg = parse_config(args.config)
    result = harness.alpha_sweep(cfg, workers=args.workers, progress=_progress)
    for path in harness.write_sweep_outputs(cfg, result):
        print(f"wrote {path}")
    return 0


def _cmd_interval_sweep(args: argparse.Namespace) -> int:
    cfg = parse_config(args.config)
    result = harness.interval_sweep(cfg, workers=args.workers, progress=_progress)
    for path in harness.write_sweep_outputs(cfg, result):
        print(f"wrote {path}")
    return 0


def _cmd_rank(args: argparse.Namespace) -> int:
    paths = sorted(
        {p for root in args.results for p in Path(root).rglob("grid_summary.csv")}
    )
    if not paths:
        raise ValueError("no grid_summary.csv found under the given directories")
    ranks = harness.rank_from_summaries(paths)
    out = Path(args.output)
    harness.write_rank_csv(out, ranks)
    for sampling, by_metric in ranks.items():
        for metric, table in by_metric.items():
            order = sorted(table.items(), key=lambda kv: kv[1]["avg"])
            line = ", ".join(f"{m}={v['avg']:.2f}" for m, v in order)
            print(f"{sampling}/{metric}: {line}")
    print(f"wrote {out}")
    return 0


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coglink",
        description="Temporal link prediction benchmark over interaction logs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="print node/edge/event/timestamp counts as JSON")
    p.add_argument("log", help="interaction log file (u v t per line)")
    p.add_argument("--format", default="auto", choices=["auto", "whitespace", "csv"])
    p.set_defaults(func=_cmd_stats)

    for name, func, desc in [
        ("run", _cmd_run, "evaluate methods at one pinned parameter point"),
        ("grid", _cmd_grid, "search the configured parameter grid"),
        ("alpha-sweep", _cmd_alpha_sweep, "sweep the mixing weight alpha"),
        ("interval-sweep", _cmd_interval_sweep, "sweep the window interval"),
    ]:
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", required=True, help="key=value experiment file")
        p.add_argument("--workers", type=_positive_int, default=None,
                       help="evaluation processes (default: COGLINK_WORKERS or all cores)")
        if name == "run":
            p.add_argument("--dump-scores", action="store_true",
                           help="also write per-split u,v,score files")
        p.set_defaults(func=func)

    p = sub.add_parser("rank", help="average method ranks across grid summaries")
    p.add_argument("results", nargs="+", help="directories holding grid_summary.csv files")
    p.add_argument("--output", default="rank_table.csv")
    p.set_defaults(func=_cmd_rank)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
