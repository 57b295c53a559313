"""Monte Carlo budget sweeps over the three allocation modes.

Each Monte Carlo run draws one scene, fits one allocator per mode on it and
allocates every budget of the grid. Rows are keyed by (mode, mc_run, budget)
and always written in that order, whatever the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import platform
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .qram import AftParams, MODES, QRAMAllocator
from .scenario import RNG_NAME, SCENE_VARIANTS, GeneratedScene, SceneParams, generate_scene
from .validation import parse_budgets

log = logging.getLogger(__name__)

DEFAULT_BUDGETS = "0.01:0.01:1.00"
METRICS = ("active_tracks", "total_utility", "mean_angular_error_mrad", "wall_time_s", "eval_count")


@dataclass(frozen=True)
class RunConfig:
    modes: Tuple[str, ...] = MODES
    scene: str = "70km"
    n_targets: int = 60
    n_mc: int = 1
    budgets: Tuple[float, ...] = tuple(parse_budgets(DEFAULT_BUDGETS))
    seed: int = 0
    aft: AftParams = AftParams()
    n_high_priority: Optional[int] = None
    scene_file: Optional[str] = None
    dump_packing: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        bad = [m for m in self.modes if m not in MODES]
        if bad or not self.modes:
            raise ValueError(f"modes must be drawn from {MODES}, got {list(self.modes)}")
        if self.scene not in SCENE_VARIANTS:
            raise ValueError(f"scene must be one of {sorted(SCENE_VARIANTS)}, got {self.scene!r}")
        if self.n_mc < 1:
            raise ValueError("n_mc must be at least 1")
        if self.n_targets < 1:
            raise ValueError("n_targets must be at least 1")
        if not self.budgets or any(not 0.0 < b <= 1.0 for b in self.budgets):
            raise ValueError("budgets must be non-empty and lie in (0, 1]")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.scene_file is not None and self.n_mc != 1:
            raise ValueError("a replayed scene file allows exactly one Monte Carlo run")

    @property
    def high_priority(self) -> int:
        if self.n_high_priority is not None:
            return self.n_high_priority
        return min(12, self.n_targets)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["modes"] = list(self.modes)
        d["budgets"] = list(self.budgets)
        d["n_high_priority"] = self.high_priority
        return d


@dataclass(frozen=True)
class RunMetrics:
    mode: str
    scene: str
    seed: int
    mc_run: int
    budget: float
    active_tracks: int
    total_utility: float
    mean_angular_error_mrad: float
    wall_time_s: float
    eval_count: int


_COLUMNS = [f.name for f in fields(RunMetrics)]
_TYPES = {f.name: f.type for f in fields(RunMetrics)}


def run_seeds(seed: int, n_mc: int) -> List[int]:
    """Independent per-run scene seeds derived from one master seed."""
    children = np.random.SeedSequence(seed).spawn(n_mc)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def _scene_for(config: RunConfig, seed: int) -> GeneratedScene:
    if config.scene_file is not None:
        return GeneratedScene.load(config.scene_file)
    params = SceneParams(
        n_targets=config.n_targets,
        range_max=SCENE_VARIANTS[config.scene],
        n_high_priority=config.high_priority,
        seed=seed,
    )
    return generate_scene(params)


def _dump(config: RunConfig, mc_run: int, alloc) -> None:
    root = Path(config.dump_packing)
    root.mkdir(parents=True, exist_ok=True)
    name = f"packing_run{mc_run:03d}_budget{alloc.budget:.4f}.json"
    records = alloc.packing.to_records() if alloc.packing is not None else []
    doc = {"mc_run": mc_run, "budget": alloc.budget, "height": alloc.total_resource, "boxes": records}
    (root / name).write_text(json.dumps(doc, indent=1))


def _one_run(config: RunConfig, mc_run: int, seed: int) -> Tuple[List[RunMetrics], dict]:
    scene = _scene_for(config, seed)
    rows = []
    info = {"mc_run": mc_run, "seed": seed, "unallocatable": {}}
    for mode in config.modes:
        t0 = time.perf_counter()
        est = QRAMAllocator(mode=mode, aft_params=config.aft).fit(scene)
        allocs = est.predict(config.budgets)
        wall = time.perf_counter() - t0
        info["unallocatable"][mode] = list(est.unallocatable_)
        for a in allocs:
            if config.dump_packing and mode == "split-constrained":
                _dump(config, mc_run, a)
            q = a.mean_angular_error
            rows.append(
                RunMetrics(
                    mode=mode,
                    scene=config.scene,
                    seed=seed,
                    mc_run=mc_run,
                    budget=a.budget,
                    active_tracks=a.active_tracks,
                    total_utility=a.total_utility,
                    mean_angular_error_mrad=q * 1e3 if math.isfinite(q) else math.nan,
                    wall_time_s=wall,
                    eval_count=est.eval_count_,
                )
            )
    return rows, info


def _one_run_star(args):
    return _one_run(*args)


def run_experiment(config: RunConfig, progress: bool = False) -> Tuple[List[RunMetrics], List[dict]]:
    """Run every Monte Carlo run of ``config``; returns rows and per-run notes."""
    seeds = [config.seed] if config.scene_file else run_seeds(config.seed, config.n_mc)
    jobs = [(config, r, s) for r, s in enumerate(seeds)]
    results = []
    if config.workers == 1 or len(jobs) == 1:
        for job in jobs:
            results.append(_one_run(*job))
            if progress:
                log.info("run %d/%d done", len(results), len(jobs))
    else:
        with ProcessPoolExecutor(max_workers=min(config.workers, len(jobs))) as pool:
            for res in pool.map(_one_run_star, jobs):
                results.append(res)
                if progress:
                    log.info("run %d/%d done", len(results), len(jobs))

    mode_rank = {m: i for i, m in enumerate(config.modes)}
    budget_rank = {b: i for i, b in enumerate(config.budgets)}
    rows = [row for rs, _ in results for row in rs]
    rows.sort(key=lambda r: (mode_rank[r.mode], r.mc_run, budget_rank[r.budget]))
    notes = [info for _, info in results]
    for info in notes:
        for mode, tasks in info["unallocatable"].items():
            if tasks:
                log.warning("run %d (%s): %d task(s) have no feasible set-point", info["mc_run"], mode, len(tasks))
    return rows, notes


def write_csv(rows: Iterable[RunMetrics], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(_COLUMNS)
    for r in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in (getattr(r, c) for c in _COLUMNS)])


def rows_to_csv(rows: Iterable[RunMetrics]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def read_csv(fh) -> List[RunMetrics]:
    reader = csv.DictReader(fh)
    if reader.fieldnames != _COLUMNS:
        raise ValueError(f"unexpected columns {reader.fieldnames}; expected {_COLUMNS}")
    casts = {"int": int, "float": float, "str": str}
    return [RunMetrics(**{c: casts[_TYPES[c]](rec[c]) for c in _COLUMNS}) for rec in reader]


def sidecar(config: RunConfig, notes: Sequence[dict]) -> dict:
    return {
        "config": config.to_dict(),
        "software": {"sapa_rrm": __version__, "numpy": np.__version__, "python": platform.python_version()},
        "rng": RNG_NAME,
        "runs": list(notes),
    }


def save(rows: Sequence[RunMetrics], config: RunConfig, notes: Sequence[dict], path) -> Path:
    """Write the CSV and its JSON sidecar (same stem, ``.json``)."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        write_csv(rows, fh)
    side = path.with_suffix(".json")
    side.write_text(json.dumps(sidecar(config, notes), indent=1, sort_keys=True))
    return side


@dataclass
class SummaryRow:
    mode: str
    scene: str
    budget: float
    metric: str
    n: int
    mean: float
    std: float = math.nan
    lower: float = math.nan
    upper: float = math.nan


def summarize(rows: Iterable[RunMetrics], metrics: Sequence[str] = METRICS) -> List[SummaryRow]:
    """Per (mode, scene, budget) mean, sample std and mean +/- 2 std.

    Non-finite values (no allocated track has an angular error) are left out.
    With fewer than two values the std and the band stay NaN.
    """
    groups: Dict[tuple, List[RunMetrics]] = {}
    for r in rows:
        groups.setdefault((r.mode, r.scene, r.budget), []).append(r)
    out = []
    for (mode, scene, budget), rs in groups.items():
        for m in metrics:
            vals = [float(getattr(r, m)) for r in rs]
            vals = [v for v in vals if math.isfinite(v)]
            if not vals:
                out.append(SummaryRow(mode, scene, budget, m, 0, math.nan))
                continue
            mean = statistics.fmean(vals)
            row = SummaryRow(mode, scene, budget, m, len(vals), mean)
            if len(vals) >= 2:
                row.std = statistics.stdev(vals)
                row.lower, row.upper = mean - 2 * row.std, mean + 2 * row.std
            out.append(row)
    return out


def summary_to_csv(summary: Sequence[SummaryRow]) -> str:
    buf = io.StringIO()
    cols = [f.name for f in fields(SummaryRow)]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for s in summary:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in (getattr(s, c) for c in cols)])
    return buf.getvalue()


def default_workers() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return os.cpu_count() or 1
