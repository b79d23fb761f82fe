"""Experiment configuration: flat ``key = value`` files and grid presets.

Values are scalars or comma-separated lists; ``#`` starts a comment.  Window
intervals are given in minutes and lifetimes in hours (converted to seconds
internally; timestamps are integer seconds).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .scoring import METHODS

SAMPLINGS = ("edge", "event", "future")
OBJECTIVES = ("auc", "avg_precision")

_COMMON_GRID = {
    "mu": [0.3, 0.5, 0.8],
    "theta": [0.1, 0.2],
    "forgetting": ["lin", "exp", "pow"],
    "aggregation": ["sum", "avg"],
}

# per-dataset search grids (interval in minutes, lifetime in hours)
PRESETS: dict[str, dict[str, list]] = {
    "hypertext": {
        "interval_minutes": [0, 5, 10, 30, 60, 120, 180, 240, 300, 360],
        "lifetime_hours": [0.5, 1, 1.5, 2, 3, 6, 12, 24, 48],
        **_COMMON_GRID,
    },
    "manufacturing": {
        "interval_minutes": [0, 1440, 4320, 10080, 20160, 43200],
        "lifetime_hours": [24, 72, 168, 336, 720, 2160, 4320],
        **_COMMON_GRID,
    },
    "eu_email": {
        "interval_minutes": [0, 1440, 4320, 10080, 20160, 43200],
        "lifetime_hours": [24, 72, 168, 336, 720, 2160, 4320],
        **_COMMON_GRID,
    },
    "office": {
        "interval_minutes": [0, 5, 10, 30, 60, 120, 180, 240, 300, 360, 720, 1440],
        "lifetime_hours": [1, 1.5, 2, 3, 6, 12, 24, 48, 72, 96, 120, 144, 168, 192],
        **_COMMON_GRID,
    },
    "highschool": {
        "interval_minutes": [0, 5, 10, 30, 60, 120, 180, 240, 300, 360, 720],
        "lifetime_hours": [1, 1.5, 2, 3, 6, 12, 24, 48, 72],
        **_COMMON_GRID,
    },
}


@dataclass
class ExperimentConfig:
    dataset: Path
    name: str
    fmt: str = "auto"
    sampling: str = "edge"
    methods: list[str] = field(default_factory=lambda: list(METHODS))
    interval_minutes: list[float] = field(default_factory=lambda: [60.0])
    lifetime_hours: list[float] = field(default_factory=lambda: [24.0])
    mu: list[float] = field(default_factory=lambda: [0.5])
    theta: list[float] = field(default_factory=lambda: [0.1])
    forgetting: list[str] = field(default_factory=lambda: ["exp"])
    aggregation: list[str] = field(default_factory=lambda: ["sum"])
    alpha: list[float] = field(default_factory=lambda: [0.5])
    fraction: float = 0.1
    seeds: list[int] = field(default_factory=lambda: [42, 43, 44, 45, 46])
    folds: int = 5
    objective: str = "auc"
    output: Path = Path("results")
    best_from: Path | None = None

    def __post_init__(self) -> None:
        self.dataset = Path(self.dataset)
        self.output = Path(self.output)
        if self.best_from is not None:
            self.best_from = Path(self.best_from)
        if self.sampling not in SAMPLINGS:
            raise ValueError(f"unknown sampling {self.sampling!r}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        if not self.methods:
            raise ValueError("no methods selected")
        for a in self.alpha:
            if not (0.0 <= a <= 1.0):
                raise ValueError("alpha values must be in [0, 1]")
        if any(i < 0 for i in self.interval_minutes):
            raise ValueError("interval must be >= 0 minutes")
        if any(h <= 0 for h in self.lifetime_hours):
            raise ValueError("lifetimes must be positive")
        if not (0.0 < self.fraction < 1.0):
            raise ValueError("fraction must be in (0, 1)")
        if self.folds < 2:
            raise ValueError("need at least two future groups")
        if not self.seeds:
            raise ValueError("need at least one seed")

    def interval_seconds(self) -> list[int]:
        return [int(round(m * 60)) for m in self.interval_minutes]

    def lifetime_seconds(self) -> list[float]:
        return [h * 3600.0 for h in self.lifetime_hours]


_LIST_KEYS = {
    "methods": str,
    "interval_minutes": float,
    "lifetime_hours": float,
    "mu": float,
    "theta": float,
    "forgetting": str,
    "aggregation": str,
    "alpha": float,
    "seeds": int,
}
_SCALAR_KEYS = {
    "dataset": str,
    "name": str,
    "format": str,
    "sampling": str,
    "preset": str,
    "fraction": float,
    "seed": int,
    "repeats": int,
    "folds": int,
    "objective": str,
    "output": str,
    "best_from": str,
}


def parse_config(path: str | Path) -> ExperimentConfig:
    """Read a flat key=value experiment file into an :class:`ExperimentConfig`."""
    raw: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ValueError(f"{path}: line {lineno}: expected 'key = value'")
            key, value = (part.strip() for part in text.split("=", 1))
            if key in raw:
                raise ValueError(f"{path}: line {lineno}: duplicate key {key!r}")
            raw[key] = value
    unknown = set(raw) - set(_LIST_KEYS) - set(_SCALAR_KEYS)
    if unknown:
        raise ValueError(f"{path}: unknown keys: {', '.join(sorted(unknown))}")
    if "dataset" not in raw:
        raise ValueError(f"{path}: missing required key 'dataset'")

    kwargs: dict = {}
    grid_defaults: dict[str, list] = {}
    if "preset" in raw:
        preset = raw.pop("preset").strip().lower()
        if preset not in PRESETS:
            raise ValueError(f"{path}: unknown preset {preset!r} "
                             f"(have: {', '.join(sorted(PRESETS))})")
        grid_defaults = {k: list(v) for k, v in PRESETS[preset].items()}

    for key, caster in _LIST_KEYS.items():
        if key in raw:
            items = [p.strip() for p in raw[key].split(",") if p.strip()]
            kwargs[key] = [caster(p) for p in items]
        elif key in grid_defaults:
            kwargs[key] = grid_defaults[key]

    seed_base = int(raw["seed"]) if "seed" in raw else None
    repeats = int(raw["repeats"]) if "repeats" in raw else 5
    if seed_base is not None:
        if "seeds" in kwargs:
            raise ValueError(f"{path}: give either 'seed' or 'seeds', not both")
        kwargs["seeds"] = [seed_base + i for i in range(repeats)]
    elif "repeats" in raw and "seeds" not in kwargs:
        kwargs["seeds"] = [42 + i for i in range(repeats)]

    dataset = Path(raw["dataset"])
    kwargs["dataset"] = dataset
    kwargs["name"] = raw.get("name", dataset.stem)
    if "format" in raw:
        kwargs["fmt"] = raw["format"]
    for key in ("sampling", "objective"):
        if key in raw:
            kwargs[key] = raw[key]
    if "fraction" in raw:
        kwargs["fraction"] = float(raw["fraction"])
    if "folds" in raw:
        kwargs["folds"] = int(raw["folds"])
    if "output" in raw:
        kwargs["output"] = Path(raw["output"])
    if "best_from" in raw:
        kwargs["best_from"] = Path(raw["best_from"])
    return ExperimentConfig(**kwargs)
