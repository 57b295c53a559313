"""Command line: ``sapa-rrm run | summarize | scene``.

Exit status is 0 on success, 2 on a bad configuration and 1 on I/O errors.
Progress and warnings go to stderr; results go to ``--out`` or stdout.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from .experiment import (
    DEFAULT_BUDGETS,
    RunConfig,
    default_workers,
    read_csv,
    rows_to_csv,
    run_experiment,
    save,
    summarize,
    summary_to_csv,
)
from .qram import MODES, AftParams
from .scenario import SCENE_VARIANTS, SceneParams, generate_scene
from .validation import parse_budgets

EXIT_CONFIG = 2
EXIT_IO = 1


def _modes(value: str) -> List[str]:
    if value == "all":
        return list(MODES)
    modes = [m.strip() for m in value.split(",") if m.strip()]
    for m in modes:
        if m not in MODES:
            raise argparse.ArgumentTypeError(f"unknown mode {m!r}; choose from {', '.join(MODES)} or 'all'")
    return modes


def _budgets(value: str) -> List[float]:
    try:
        return parse_budgets(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sapa-rrm", description="Split-aperture radar resource allocation sweeps.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo budget sweep")
    run.add_argument("--mode", type=_modes, default=list(MODES), help="mode, comma list or 'all' (default)")
    run.add_argument("--scene", choices=sorted(SCENE_VARIANTS), default="70km")
    run.add_argument("--targets", type=int, default=60)
    run.add_argument("--high-priority", type=int, default=None, help="default: min(12, targets)")
    run.add_argument("--mc", type=int, default=1, help="Monte Carlo runs")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--budgets", type=_budgets, default=parse_budgets(DEFAULT_BUDGETS),
                     help=f"comma list or start:step:end (default {DEFAULT_BUDGETS})")
    run.add_argument("--aft-alpha1", type=float, default=AftParams.alpha1)
    run.add_argument("--aft-n1", type=int, default=AftParams.n1)
    run.add_argument("--aft-n2", type=int, default=AftParams.n2)
    run.add_argument("--aft-n3", type=int, default=AftParams.n3)
    run.add_argument("--out", help="CSV path; a JSON sidecar is written next to it. Default: stdout")
    run.add_argument("--scene-file", help="replay a scene saved by 'sapa-rrm scene'")
    run.add_argument("--dump-packing", metavar="DIR", help="write constrained-mode packings as JSON")
    run.add_argument("--workers", type=int, default=None, help="parallel Monte Carlo runs (default: all cores)")
    run.add_argument("-q", "--quiet", action="store_true")

    summ = sub.add_parser("summarize", help="per-budget mean and 2-sigma bands of a metrics CSV")
    summ.add_argument("csv", nargs="+")
    summ.add_argument("--out")

    scene = sub.add_parser("scene", help="generate a scene and save it as JSON")
    scene.add_argument("--scene", choices=sorted(SCENE_VARIANTS), default="70km")
    scene.add_argument("--targets", type=int, default=60)
    scene.add_argument("--high-priority", type=int, default=None)
    scene.add_argument("--seed", type=int, default=0)
    scene.add_argument("--out")
    return p


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_run(args) -> int:
    try:
        config = RunConfig(
            modes=tuple(args.mode),
            scene=args.scene,
            n_targets=args.targets,
            n_mc=args.mc,
            budgets=tuple(args.budgets),
            seed=args.seed,
            aft=AftParams(args.aft_alpha1, args.aft_n1, args.aft_n2, args.aft_n3),
            n_high_priority=args.high_priority,
            scene_file=args.scene_file,
            dump_packing=args.dump_packing,
            workers=args.workers or default_workers(),
        )
    except ValueError as exc:
        print(f"sapa-rrm: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows, notes = run_experiment(config, progress=not args.quiet)
    if args.out:
        side = save(rows, config, notes, args.out)
        logging.getLogger(__name__).info("wrote %s and %s", args.out, side)
    else:
        sys.stdout.write(rows_to_csv(rows))
    return 0


def _cmd_summarize(args) -> int:
    rows = []
    for path in args.csv:
        with open(path, newline="") as fh:
            try:
                rows.extend(read_csv(fh))
            except ValueError as exc:
                print(f"sapa-rrm: {path}: {exc}", file=sys.stderr)
                return EXIT_CONFIG
    _emit(summary_to_csv(summarize(rows)), args.out)
    return 0


def _cmd_scene(args) -> int:
    hp = args.high_priority if args.high_priority is not None else min(12, args.targets)
    try:
        params = SceneParams(n_targets=args.targets, range_max=SCENE_VARIANTS[args.scene], n_high_priority=hp, seed=args.seed)
    except ValueError as exc:
        print(f"sapa-rrm: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    scene = generate_scene(params)
    _emit(scene.to_json() + "\n", args.out)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if getattr(args, "quiet", False) else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    handlers = {"run": _cmd_run, "summarize": _cmd_summarize, "scene": _cmd_scene}
    try:
        return handlers[args.command](args)
    except OSError as exc:
        print(f"sapa-rrm: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
