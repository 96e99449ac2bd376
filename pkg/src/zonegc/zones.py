"""Zone classification, cost model, and the pooled slot arena.

Objects live in one of three zones for their whole life. Re-zoning never
moves a slot: the object expires in place and a fresh request claims a slot
in the target zone. Per-zone free pools absorb repeat requests, which is what
keeps real allocations bounded by the peak concurrent live count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .checkpoint import ENTRIES_PER_WORD, STATE_BITS, CheckpointTable, StateCode, SweepReport
from .errors import LifecycleError, ZoneCapacityError
from .layout import ZoneId, ZoneLayout, ZONE_ORDER
from .objects import (
    EmaConfig,
    EventKind,
    FeatureVector,
    LogicalClock,
    ObjectHandle,
    ObjectHeader,
    RateTracker,
    feature_snapshot,
    make_trackers,
)

# Argmin preference when zone costs tie: green, then blue, then red.
_TIE_ORDER = (ZoneId.GREEN, ZoneId.BLUE, ZoneId.RED)


@dataclass(frozen=True)
class RateThresholds:
    """Thresholds for the rate-based policy; red cut below green cut."""

    access_red: float = 10.0
    access_green: float = 100.0
    mutation_red: float = 10.0
    mutation_green: float = 100.0

    def __post_init__(self) -> None:
        if not self.access_red < self.access_green:
            raise ValueError("rate policy needs access_red < access_green")
        if not self.mutation_red < self.mutation_green:
            raise ValueError("rate policy needs mutation_red < mutation_green")


@dataclass(frozen=True)
class PredicateThresholds:
    """Thresholds for the predicate policy.

    Note the reversed rate orderings relative to RateThresholds: here the red
    cuts sit above the green cuts for mutation and access. The two policies
    describe the zones differently and are deliberately kept separate.
    """

    lifetime_red: float = 0.1
    lifetime_green: float = 10.0
    mutation_red: float = 100.0
    mutation_green: float = 10.0
    access_red: float = 100.0
    access_green: float = 10.0
    size_red: float = 256.0
    size_green: float = 4096.0

    def __post_init__(self) -> None:
        if not self.lifetime_red < self.lifetime_green:
            raise ValueError("predicate policy needs lifetime_red < lifetime_green")
        if not self.mutation_red > self.mutation_green:
            raise ValueError("predicate policy needs mutation_red > mutation_green")
        if not self.access_red > self.access_green:
            raise ValueError("predicate policy needs access_red > access_green")
        if not self.size_red < self.size_green:
            raise ValueError("predicate policy needs size_red < size_green")


@dataclass(frozen=True)
class ZoneWeights:
    """Cost weights of one zone: mark, scan, and staging work."""

    mark: float
    scan: float
    stage: float

    def __post_init__(self) -> None:
        if min(self.mark, self.scan, self.stage) < 0:
            raise ValueError("cost weights must be non-negative")


def _default_weights() -> dict[ZoneId, ZoneWeights]:
    return {
        ZoneId.RED: ZoneWeights(1.0, 1.0, 4.0),
        ZoneId.GREEN: ZoneWeights(1.0, 0.8, 2.0),
        ZoneId.BLUE: ZoneWeights(0.5, 0.5, 1.0),
    }


def _default_pause() -> dict[ZoneId, float]:
    return {ZoneId.RED: 0.5, ZoneId.GREEN: 0.3, ZoneId.BLUE: 0.2}


@dataclass(frozen=True)
class CostParams:
    """Per-zone cost weights plus stop-the-world pause fractions.

    Orderings enforced at construction: staging strictly decreases red to
    blue; mark weight red and green agree within mark_tolerance and both
    exceed blue; scan weight is non-increasing red to blue.
    """

    weights: dict[ZoneId, ZoneWeights] = field(default_factory=_default_weights)
    pause_fraction: dict[ZoneId, float] = field(default_factory=_default_pause)
    mark_tolerance: float = 0.25

    def __post_init__(self) -> None:
        r, g, b = (self.weights[z] for z in ZONE_ORDER)
        if not r.stage > g.stage > b.stage:
            raise ValueError("staging weights must strictly decrease red > green > blue")
        if not (r.mark >= g.mark > b.mark and abs(r.mark - g.mark) <= self.mark_tolerance):
            raise ValueError(
                "mark weights must satisfy red >= green > blue with "
                f"|red - green| <= {self.mark_tolerance}"
            )
        if not r.scan >= g.scan >= b.scan:
            raise ValueError("scan weights must be non-increasing red >= green >= blue")
        for zone in ZONE_ORDER:
            if not 0.0 < self.pause_fraction[zone] < 1.0:
                raise ValueError(f"pause fraction of zone {zone} must be in (0, 1)")


def zone_cost(zone: ZoneId, f: FeatureVector, costs: CostParams) -> float:
    """Expected per-object work of hosting f in zone: mark, scan, staging."""
    w = costs.weights[zone]
    return w.mark * f.complexity_weight + w.scan * f.fan_out + w.stage * f.size


def pause_contribution(zone: ZoneId, members: list[FeatureVector],
                       costs: CostParams) -> float:
    """Pause-weighted total cost of a zone's member set."""
    return costs.pause_fraction[zone] * sum(zone_cost(zone, f, costs) for f in members)


def argmin_cost(f: FeatureVector, costs: CostParams) -> ZoneId:
    best = None
    best_cost = None
    for zone in _TIE_ORDER:
        c = zone_cost(zone, f, costs)
        if best_cost is None or c < best_cost:
            best, best_cost = zone, c
    return best


def classify_simple(f: FeatureVector, th: RateThresholds, costs: CostParams) -> ZoneId:
    """Rate-based zone choice.

    Red needs both rates strictly under the red cuts; green takes anything at
    or over a green cut. The ambiguous middle band, where both rates sit
    between their cuts, is settled by cheapest zone; every other fall-through
    goes to blue.
    """
    a = f.access_rate
    mu = f.mutation_rate
    if a < th.access_red and mu < th.mutation_red:
        return ZoneId.RED
    if a >= th.access_green or mu >= th.mutation_green:
        return ZoneId.GREEN
    if th.access_red <= a and th.mutation_red <= mu:
        # both rates inside [red, green): ambiguous, take the cheapest zone
        return argmin_cost(f, costs)
    return ZoneId.BLUE


def eligibility(f: FeatureVector, th: PredicateThresholds) -> dict[ZoneId, bool]:
    """The three zone-eligibility predicates of the predicate policy."""
    e_r = (
        f.lifetime <= th.lifetime_red
        and f.mutation_rate >= th.mutation_red
        and f.access_rate >= th.access_red
        and f.size <= th.size_red
    )
    e_g = (
        th.lifetime_red < f.lifetime <= th.lifetime_green
        and th.mutation_green <= f.mutation_rate < th.mutation_red
        and th.access_green <= f.access_rate < th.access_red
        and th.size_red < f.size <= th.size_green
    )
    e_b = (
        f.lifetime > th.lifetime_green
        or f.mutation_rate < th.mutation_green
        or f.access_rate < th.access_green
        or f.size > th.size_green
    )
    return {ZoneId.RED: e_r, ZoneId.GREEN: e_g, ZoneId.BLUE: e_b}


def classify_predicates(f: FeatureVector, th: PredicateThresholds,
                        costs: CostParams) -> ZoneId:
    """Predicate-based zone choice.

    A single eligible zone wins outright; zero or several eligible zones fall
    back to the cheapest of all three.
    """
    eligible = eligibility(f, th)
    applicable = [zone for zone in ZONE_ORDER if eligible[zone]]
    if len(applicable) == 1:
        return applicable[0]
    return argmin_cost(f, costs)


@dataclass(frozen=True)
class PoolStats:
    """Allocation counters of one zone. total = real + reused always."""

    total_requests: int
    real_allocations: int
    reused_objects: int
    expired_objects: int
    pool_size: int

    def __post_init__(self) -> None:
        if self.total_requests != self.real_allocations + self.reused_objects:
            raise ValueError("total_requests must equal real + reused")
        if self.pool_size > self.real_allocations:
            raise ValueError("pool cannot outgrow real allocations")


class ZoneArena:
    """Slot allocator over the checkpoint table with per-zone reuse pools.

    Ownership contract: one worker drives a given zone partition at a time;
    there is no internal locking. Counters are monotone and aggregated by
    readers at quiescent points.
    """

    def __init__(
        self,
        layout: ZoneLayout | None = None,
        *,
        base: int = 0,
        clock: LogicalClock | None = None,
        rate_window: float = 1.0,
        ema: EmaConfig | None = None,
        rate_thresholds: RateThresholds | None = None,
        predicate_thresholds: PredicateThresholds | None = None,
        costs: CostParams | None = None,
        policy: str = "simple",
        pool_discipline: str = "lifo",
    ) -> None:
        if policy not in ("simple", "predicates"):
            raise ValueError(f"unknown policy {policy!r}")
        if pool_discipline not in ("lifo", "fifo"):
            raise ValueError(f"unknown pool discipline {pool_discipline!r}")
        self.layout = layout or ZoneLayout(1024, 1024, 1024)
        self.table = CheckpointTable(self.layout, base)
        self.clock = clock or LogicalClock()
        self.rate_window = rate_window
        self.ema = ema or EmaConfig()
        self.rate_thresholds = rate_thresholds or RateThresholds()
        self.predicate_thresholds = predicate_thresholds or PredicateThresholds()
        self.costs = costs or CostParams()
        self.policy = policy
        self.pool_discipline = pool_discipline
        # Indexed by ZoneId.ordinal; hot paths avoid enum-keyed dicts.
        self._pools: list[list[int]] = [[] for _ in ZONE_ORDER]
        self._fresh_next: list[int] = [self.layout.start(z) for z in ZONE_ORDER]
        self._fresh_stop: list[int] = [self.layout.span(z)[1] for z in ZONE_ORDER]
        self._real: list[int] = [0, 0, 0]
        self._reused: list[int] = [0, 0, 0]
        self._expired: list[int] = [0, 0, 0]
        self._headers: dict[int, ObjectHeader] = {}
        self._site_trackers: dict[str, RateTracker] = {}
        self._words = self.table._words  # shared storage for inlined writes
        self._lifo = pool_discipline == "lifo"

    # -- allocation ---------------------------------------------------------

    def site_tracker(self, site_tag: str) -> RateTracker:
        tracker = self._site_trackers.get(site_tag)
        if tracker is None:
            tracker = RateTracker(self.rate_window, self.ema, self.clock.now)
            self._site_trackers[site_tag] = tracker
        return tracker

    def allocate(
        self,
        zone: ZoneId,
        site_tag: str = "default",
        *,
        size: float = 0.0,
        fan_out: float = 0.0,
        complexity_weight: float = 0.0,
    ) -> ObjectHandle:
        """Serve one allocation request from the pool or a fresh slot."""
        clock = self.clock
        clock.ops += 1
        now = clock.ops * clock.seconds_per_op
        zi = zone.ordinal
        pool = self._pools[zi]
        if pool:
            idx = pool.pop() if self._lifo else pool.pop(0)
            self._reused[zi] += 1
        else:
            idx = self._fresh_next[zi]
            if idx >= self._fresh_stop[zi]:
                raise ZoneCapacityError(
                    f"zone {zone} exhausted at {self.layout.size(zone)} slots"
                )
            self._fresh_next[zi] = idx + 1
            self._real[zi] += 1
        site = self._site_trackers.get(site_tag)
        if site is None:
            site = self.site_tracker(site_tag)
        site.record(now)
        header = self._headers.get(idx)
        if header is None:
            handle = ObjectHandle(idx, self.table.address_of(idx))
            header = ObjectHeader(
                handle=handle,
                zone=zone,
                generation=self.layout.generation_of(idx),
                checkpoint_index=idx,
                site_tag=site_tag,
                allocated_at=now,
                last_event_at=now,
                size=size,
                fan_out=fan_out,
                complexity_weight=complexity_weight,
                trackers=make_trackers(self.rate_window, self.ema, now, site),
            )
            self._headers[idx] = header
        else:
            # Reuse the pooled slot for a brand-new object: same placement,
            # fresh counters.
            header.alive = True
            header.site_tag = site_tag
            header.allocated_at = now
            header.last_event_at = now
            header.lifetime = 0.0
            header.size = size
            header.fan_out = fan_out
            header.complexity_weight = complexity_weight
            trackers = header.trackers
            trackers[EventKind.ALLOCATION] = site
            trackers[EventKind.MUTATION].reset(now)
            trackers[EventKind.ACCESS].reset(now)
        # set_state(idx, ACTIVE) inlined; idx came from this arena so the
        # range check is redundant here.
        words = self._words
        word, lane = divmod(idx, ENTRIES_PER_WORD)
        shift = lane * STATE_BITS
        words[word] = (words[word] & ~(7 << shift)) | (1 << shift)
        return header.handle

    def _live_header(self, handle: ObjectHandle) -> ObjectHeader:
        header = self._headers.get(handle.slot_index)
        if header is None or not header.alive:
            raise LifecycleError(f"slot {handle.slot_index} holds no live object")
        return header

    def release(self, handle: ObjectHandle) -> None:
        """Return a live slot to its zone's pool."""
        header = self._live_header(handle)
        self.clock.ops += 1
        header.alive = False
        idx = header.checkpoint_index
        # set_state(idx, IDLE) inlined
        words = self._words
        word, lane = divmod(idx, ENTRIES_PER_WORD)
        words[word] &= ~(7 << lane * STATE_BITS)
        self._pools[header.zone.ordinal].append(idx)

    def expire(self, handle: ObjectHandle) -> None:
        """Terminal expiry: mark, expire, and reclaim the slot into its pool."""
        header = self._live_header(handle)
        self.clock.ops += 1
        idx = header.checkpoint_index
        table = self.table
        table.set_state(idx, StateCode.MARKED)
        table.set_state(idx, StateCode.EXPIRED)
        header.alive = False
        zi = header.zone.ordinal
        self._expired[zi] += 1
        table.set_state(idx, StateCode.IDLE)
        self._pools[zi].append(idx)

    def expire_and_reallocate(self, handle: ObjectHandle, new_zone: ZoneId) -> ObjectHandle:
        """Re-zone by expiry plus fresh request; same-zone calls are no-ops.

        The old index returns to its own zone's pool and is never rebound to
        the new zone.
        """
        header = self._live_header(handle)
        if new_zone is header.zone:
            return handle
        site = header.site_tag
        size = header.size
        fan_out = header.fan_out
        chi = header.complexity_weight
        self.expire(handle)
        return self.allocate(
            new_zone, site, size=size, fan_out=fan_out, complexity_weight=chi
        )

    # -- queries ------------------------------------------------------------

    def header_of(self, handle: ObjectHandle) -> ObjectHeader:
        header = self._headers.get(handle.slot_index)
        if header is None:
            raise LifecycleError(f"slot {handle.slot_index} was never allocated")
        return header

    def pool_stats(self, zone: ZoneId) -> PoolStats:
        zi = zone.ordinal
        real = self._real[zi]
        reused = self._reused[zi]
        return PoolStats(
            total_requests=real + reused,
            real_allocations=real,
            reused_objects=reused,
            expired_objects=self._expired[zi],
            pool_size=len(self._pools[zi]),
        )

    def classify(self, f: FeatureVector) -> ZoneId:
        if self.policy == "simple":
            return classify_simple(f, self.rate_thresholds, self.costs)
        return classify_predicates(f, self.predicate_thresholds, self.costs)

    # -- sweep integration --------------------------------------------------

    def run_sweep(self, zone_active: dict[ZoneId, bool] | None = None) -> SweepReport:
        return self.table.epoch_sweep(zone_active)

    def reclassify_candidates(self, report: SweepReport) -> list[tuple[int, ObjectHandle]]:
        """Re-run the active policy on promotion/demotion candidates.

        Candidates whose classification moved expire and reallocate into the
        new zone; the rest are left as they are. Returns (old index, new
        handle) pairs for the moved objects.
        """
        moved = []
        for idx in report.candidates:
            header = self._headers.get(idx)
            if header is None or not header.alive:
                continue
            target = self.classify(feature_snapshot(header))
            if target is not header.zone:
                new_handle = self.expire_and_reallocate(header.handle, target)
                moved.append((idx, new_handle))
        return moved
