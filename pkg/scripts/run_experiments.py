#!/usr/bin/env python3
"""Run the full benchmark grid and write per-run reports.

Produces one CSV and one markdown file per run under --out (default
results/). Timed kernels repeat at each partition count; allocation
schedules run once each. --quick divides the sizes by ten for a smoke
pass.
"""

from __future__ import annotations

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from zonegc.bench import (
    WorkloadSpec,
    emit_pool_stats,
    emit_report,
    run_bench,
)
from zonegc.config import RuntimeConfig, load_config
from zonegc.ppe import probe_cores

TIMED_GRID = [
    ("loop", 100_000, None),
    ("loop", 200_000, None),
    ("loop", 400_000, None),
    ("recursion", 20_000, 1000),
    ("deep_recursion", 32_000, 16_000),
    ("matrix", 64, None),
]

ALLOC_GRID = [
    ("alloc_reuse", 1_000_000),
    ("zone_pressure", 1_000_000),
    ("zone_imbalance", 1_000_000),
    ("expiration", 100_000),
    ("checkpoint_lifecycle", 100_000),
]


def scaled(size: int, quick: bool) -> int:
    return max(size // 10, 1) if quick else size


def run_timed(out: pathlib.Path, config: RuntimeConfig, quick: bool) -> None:
    partition_counts = [1, 2] if probe_cores() >= 2 else [1]
    for kind, size, chunk in TIMED_GRID:
        size = scaled(size, quick)
        if chunk is not None:
            chunk = min(chunk, size)
            size -= size % chunk  # keep chains whole after scaling
        for partitions in partition_counts:
            spec = WorkloadSpec(kind, size, chunk=chunk, partitions=partitions)
            t0 = time.perf_counter()
            report = run_bench(spec, config)
            wall = time.perf_counter() - t0
            stem = f"{kind}_{size}_p{partitions}"
            (out / f"{stem}.csv").write_text(emit_report(report, "csv") + "\n")
            (out / f"{stem}.md").write_text(emit_report(report, "markdown") + "\n")
            print(f"{stem}: mean {report.mean_time_ms:.4f} ms "
                  f"checksum {report.records[0].checksum} ({wall:.2f}s)")


def run_alloc(out: pathlib.Path, config: RuntimeConfig, quick: bool) -> None:
    for kind, size in ALLOC_GRID:
        size = scaled(size, quick)
        spec = WorkloadSpec(kind, size)
        t0 = time.perf_counter()
        stats = run_bench(spec, config)
        wall = time.perf_counter() - t0
        stem = f"{kind}_{size}"
        (out / f"{stem}.csv").write_text(
            emit_pool_stats(stats, "csv", kind=kind, config=config) + "\n")
        (out / f"{stem}.md").write_text(
            emit_pool_stats(stats, "markdown", kind=kind, config=config) + "\n")
        requests = sum(s.total_requests for s in stats.values())
        expired = sum(s.expired_objects for s in stats.values())
        print(f"{stem}: {requests} requests, {expired} expired ({wall:.2f}s)")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results", help="report directory")
    parser.add_argument("--config", default=None,
                        help="runtime config file (key = value lines)")
    parser.add_argument("--quick", action="store_true",
                        help="divide sizes by ten")
    parser.add_argument("--only", choices=("timed", "alloc"), default=None,
                        help="run just one experiment family")
    args = parser.parse_args(argv)

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = load_config(args.config) if args.config else RuntimeConfig()

    if args.only in (None, "timed"):
        run_timed(out, config, args.quick)
    if args.only in (None, "alloc"):
        run_alloc(out, config, args.quick)
    print(f"reports in {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
