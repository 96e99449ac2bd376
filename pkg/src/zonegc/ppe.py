"""Partitioned parallel execution: range decomposition, worker threads,
zone-aware thread budgeting, and load rebalancing arithmetic.

Work is split into disjoint contiguous ranges, one worker per range, partial
results merged in range order so the reduced value never depends on thread
interleaving. Workers share nothing but a write-once result slot each.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Sequence

from .errors import (
    ObjectiveUndefinedError,
    PartitionFaultError,
    PartitionPlanError,
    TopologyError,
)
from .gates import eval_liveness_gate
from .layout import ZoneId, ZONE_ORDER

Triple = tuple[float, float, float]  # per-zone values in red, green, blue order


def probe_cores(override: int | None = None) -> int:
    """Usable core count, config override first, then the OS."""
    if override is not None:
        if override < 1:
            raise TopologyError(f"core override must be >= 1, got {override}")
        return override
    try:
        return len(os.sched_getaffinity(0))
    except (AttributeError, OSError):
        return os.cpu_count() or 1


def partition_ratio(threads: int, cores: int) -> Fraction:
    """Threads per core as an exact rational; above 1 means clustering."""
    if cores < 1:
        raise TopologyError(f"core count must be >= 1, got {cores}")
    if threads < 0:
        raise ValueError(f"thread count must be >= 0, got {threads}")
    return Fraction(threads, cores)


def map_threads_to_cores(threads: int, cores: int) -> list[int]:
    """Round-robin core id per thread; identity when the ratio is <= 1."""
    if cores < 1:
        raise TopologyError(f"core count must be >= 1, got {cores}")
    return [t % cores for t in range(threads)]


@dataclass(frozen=True)
class PartitionPlan:
    """Disjoint half-open ranges covering [0, total_work) exactly."""

    total_work: int
    ranges: tuple[tuple[int, int], ...]
    affinity: tuple[int, ...] | None = None

    @property
    def workers(self) -> int:
        return len(self.ranges)


def make_partitions(n: int, p: int, affinity: Sequence[int] | None = None) -> PartitionPlan:
    """Split [0, n) into p contiguous ranges differing in size by at most 1."""
    if p < 1:
        raise PartitionPlanError(f"partition count must be >= 1, got {p}")
    if n < 0:
        raise PartitionPlanError(f"work count must be >= 0, got {n}")
    ranges = tuple(((i * n) // p, ((i + 1) * n) // p) for i in range(p))
    aff = None
    if affinity is not None:
        if len(affinity) != p:
            raise PartitionPlanError("affinity list must match partition count")
        aff = tuple(affinity)
    return PartitionPlan(n, ranges, aff)


def sync_checkpoint(states: int, zone_mask: int, pending: int, width: int) -> int:
    """Lanewise retention merge for one worker's entries.

    Same formula as the liveness gate; the aggregator concatenates per-worker
    results in worker order, which run_parallel's range-ordered reduce
    provides.
    """
    return eval_liveness_gate(states, zone_mask, pending, width)


@dataclass(frozen=True)
class ThreadAllocation:
    red: int
    green: int
    blue: int

    def __post_init__(self) -> None:
        if min(self.red, self.green, self.blue) < 0:
            raise ValueError("thread counts must be non-negative")

    @property
    def total(self) -> int:
        return self.red + self.green + self.blue

    def of(self, zone: ZoneId) -> int:
        return {ZoneId.RED: self.red, ZoneId.GREEN: self.green,
                ZoneId.BLUE: self.blue}[zone]


def _validate_eta(eta: Triple) -> None:
    for value in eta:
        if not 0.0 < value < 1.0:
            raise ValueError(f"eta multipliers must lie in (0, 1), got {value}")


def allocate_threads(zone_costs: Triple, k: int, eta: Triple,
                     *, allow_zero_zones: bool = False) -> ThreadAllocation:
    """Proportional-cost thread split reconciled to sum exactly k.

    Each zone starts at ceil(eta * cost_share * k). Overshoot is trimmed from
    the largest fractional over-round first (largest count on ties);
    shortfall goes to the largest cost share. All-zero costs fall back to a
    uniform floor(k/3) split with the remainder on green.
    """
    if k < 0:
        raise ValueError(f"total thread count must be >= 0, got {k}")
    if k < 3 and not allow_zero_zones:
        raise ValueError(
            "k < 3 leaves some zone without a thread; pass allow_zero_zones=True"
        )
    if min(zone_costs) < 0:
        raise ValueError("zone costs must be non-negative")
    _validate_eta(eta)
    total_cost = sum(zone_costs)
    if total_cost == 0:
        each = k // 3
        return ThreadAllocation(each, each + (k - 3 * each), each)
    shares = [c / total_cost for c in zone_costs]
    raw = [eta[i] * shares[i] * k for i in range(3)]
    counts = [math.ceil(r) for r in raw]
    while sum(counts) > k:
        # trim the zone that rounding inflated the most
        i = max((i for i in range(3) if counts[i] > 0),
                key=lambda i: (counts[i] - raw[i], counts[i], -i))
        counts[i] -= 1
    while sum(counts) < k:
        i = max(range(3), key=lambda i: (shares[i], counts[i], -i))
        counts[i] += 1
    return ThreadAllocation(*counts)


def scheduler_objective(pauses: Triple, alloc: ThreadAllocation, pi: Triple,
                        delta: Triple) -> float:
    """Pause-plus-contention score of one candidate allocation.

    Per zone: pi * pause + delta * pause / threads. A loaded zone with zero
    threads has no defined score.
    """
    counts = (alloc.red, alloc.green, alloc.blue)
    total = 0.0
    for i in range(3):
        p = pauses[i]
        if p < 0:
            raise ValueError("pause contributions must be non-negative")
        if delta[i] <= 0:
            raise ValueError("throughput sensitivities must be positive")
        if p == 0:
            continue
        if counts[i] == 0:
            raise ObjectiveUndefinedError(
                f"zone {ZONE_ORDER[i]} has pause {p} but zero threads"
            )
        total += pi[i] * p + delta[i] * (p / counts[i])
    return total


def optimize_thread_allocation(pauses: Triple, k: int, pi: Triple,
                               delta: Triple) -> tuple[ThreadAllocation, float]:
    """Best allocation of k threads by enumerating all compositions.

    Zones with positive pause need at least one thread. Ties keep the first
    candidate in lexicographic (red, green, blue) order.
    """
    floors = [1 if pauses[i] > 0 else 0 for i in range(3)]
    if sum(floors) > k:
        raise ValueError(f"k={k} cannot cover {sum(floors)} loaded zones")
    best: tuple[ThreadAllocation, float] | None = None
    for r in range(floors[0], k - floors[1] - floors[2] + 1):
        for g in range(floors[1], k - r - floors[2] + 1):
            b = k - r - g
            candidate = ThreadAllocation(r, g, b)
            score = scheduler_objective(pauses, candidate, pi, delta)
            if best is None or score < best[1]:
                best = (candidate, score)
    assert best is not None  # floors sum <= k guarantees one candidate
    return best


@dataclass(frozen=True)
class RebalanceSample:
    """One partition's observed thread time (s), memory (KB), active count."""

    thread_time: float
    mem_usage: float
    partitions_active: int

    def __post_init__(self) -> None:
        if self.partitions_active < 1:
            raise ValueError("partitions_active must be >= 1")


def load_target(sample: RebalanceSample) -> float:
    """Per-sample load value (thread_time + mem_usage) / partitions_active."""
    return (sample.thread_time + sample.mem_usage) / sample.partitions_active


@dataclass(frozen=True)
class RebalancePlan:
    loads: tuple[float, ...]
    target: float
    flagged: tuple[int, ...]


def rebalance_targets(samples: Sequence[RebalanceSample], *, factor: float = 1.5,
                      normalize: bool = True) -> RebalancePlan:
    """Load per sample plus the set of partitions worth splitting.

    Normalized mode rescales time and memory by their sample means before
    summing, since the two carry different units; raw mode adds them as-is.
    A partition is flagged when its load exceeds factor times the mean load.
    """
    if not samples:
        raise ValueError("need at least one sample")
    if normalize:
        mean_t = sum(s.thread_time for s in samples) / len(samples)
        mean_m = sum(s.mem_usage for s in samples) / len(samples)
        loads = tuple(
            ((s.thread_time / mean_t if mean_t else 0.0)
             + (s.mem_usage / mean_m if mean_m else 0.0)) / s.partitions_active
            for s in samples
        )
    else:
        loads = tuple(load_target(s) for s in samples)
    target = sum(loads) / len(loads)
    flagged = tuple(i for i, load in enumerate(loads) if load > factor * target)
    return RebalancePlan(loads, target, flagged)


def run_parallel(
    plan: PartitionPlan,
    kernel: Callable[[int, int], Any],
    combine: Callable[[Any, Any], Any],
    identity: Any,
    *,
    stack_bytes: int | None = None,
) -> Any:
    """Run the kernel over every range on its own thread and reduce in order.

    kernel(lo, hi) must be a pure function of its range. Affinity pinning is
    best effort; boxes without it run unpinned. A failing worker does not
    stop the others: after the join, their partials are delivered inside the
    fault error.
    """
    workers = plan.workers
    results: list[Any] = [None] * workers
    failures: list[tuple[tuple[int, int], BaseException] | None] = [None] * workers

    def body(i: int, lo: int, hi: int, core: int | None) -> None:
        if core is not None:
            try:
                os.sched_setaffinity(0, {core})
            except (AttributeError, OSError):
                pass  # unpinned is acceptable
        try:
            results[i] = kernel(lo, hi)
        except BaseException as exc:  # noqa: BLE001  (isolated per partition)
            failures[i] = ((lo, hi), exc)

    old_stack = None
    if stack_bytes is not None:
        old_stack = threading.stack_size(stack_bytes)
    try:
        threads = []
        for i, (lo, hi) in enumerate(plan.ranges):
            core = plan.affinity[i] if plan.affinity else None
            t = threading.Thread(
                target=body, args=(i, lo, hi, core), name=f"ppe-worker-{i}"
            )
            t.start()
            threads.append(t)
    finally:
        if old_stack is not None:
            threading.stack_size(old_stack)
    for t in threads:
        t.join()

    failed = [f for f in failures if f is not None]
    if failed:
        partials = {
            plan.ranges[i]: results[i]
            for i in range(workers)
            if failures[i] is None
        }
        raise PartitionFaultError(failed, partials)

    acc = identity
    for value in results:
        acc = combine(acc, value)
    return acc
