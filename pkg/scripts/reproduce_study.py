#!/usr/bin/env python3
"""Regenerate the null-distribution study: results CSVs plus SVG charts.

Runs the simulation grids behind scripts/configs/*.cfg through the
library (so --reps can scale them without editing config files) and
renders the mean / variance / type-1-error charts for each.

    python3 scripts/reproduce_study.py --outdir results --study all
    python3 scripts/reproduce_study.py --outdir results --study main --reps 10000

reps=2000 gives figure-level Monte Carlo noise in minutes; 10000 matches
the original study scale.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from gof_lab import Scenario, run_grid
from gof_lab.cli import emit_plots, read_results_csv, write_results_csv

STUDIES = ("main", "g26", "noise", "n100")


def build_cells(study: str, reps: int, seed: int) -> list[Scenario]:
    if study == "main":
        return [
            Scenario(n=500, m=m, d=d, G=10, reps=reps, seed=seed)
            for m in (50, 100, 500)
            for d in range(2, 26)
        ]
    if study == "g26":
        return [
            Scenario(n=500, m=50, d=d, G=26, reps=reps, seed=seed)
            for d in range(2, 26)
        ]
    if study == "noise":
        return [
            Scenario(n=500, m=50, d=25, G=10, reps=reps, seed=seed, sigma2_e=s2e)
            for s2e in (0.0, 0.001, 0.01, 0.1)
        ]
    if study == "n100":
        return [
            Scenario(n=100, m=m, d=d, G=10, reps=reps, seed=seed)
            for m in (20, 50, 100)
            for d in range(2, 11)
        ]
    raise ValueError(f"unknown study {study!r}")


def run_study(study: str, outdir: Path, reps: int, seed: int, workers: int) -> None:
    cells = build_cells(study, reps, seed)
    print(f"[{study}] running {len(cells)} cells x {reps} realizations ...")
    start = time.monotonic()
    summaries = run_grid(cells, workers=workers)
    print(f"[{study}] done in {time.monotonic() - start:.1f}s")

    results_path = outdir / f"{study}_results.csv"
    write_results_csv(summaries, results_path, long_format=True)
    plot_dir = outdir / f"{study}_plots"
    written = emit_plots(read_results_csv(results_path), plot_dir)
    print(f"[{study}] wrote {results_path} and {len(written)} charts in {plot_dir}/")

    failed = [s for s in summaries if s.failures]
    if failed:
        total = sum(s.failures for s in failed)
        print(f"[{study}] note: {total} realizations excluded across {len(failed)} cells")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", default="results")
    parser.add_argument("--study", choices=STUDIES + ("all",), default="all")
    parser.add_argument("--reps", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=2)
    args = parser.parse_args(argv)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    studies = STUDIES if args.study == "all" else (args.study,)
    for study in studies:
        run_study(study, outdir, args.reps, args.seed, args.workers)
    return 0


if __name__ == "__main__":
    sys.exit(main())
