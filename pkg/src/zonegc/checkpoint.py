"""Packed 3-bit checkpoint table and its state machine.

Every tracked object owns one 3-bit entry in a global table laid out as
[red | green | blue] regions. Entry state encodes the lifecycle phase; the
sweep evaluates retention with the logic gates, one packed word at a time,
so per-entry work is constant and no object graph is traversed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import AlignmentError, IndexRangeError, SignalConflictError
from .gates import eval_liveness_gate, transition_detect  # noqa: F401  (re-export)
from .layout import SLOT_BYTES, Generation, ZoneId, ZoneLayout, ZONE_ORDER

ENTRIES_PER_WORD = 21  # 21 entries * 3 bits = 63 bits, 1 pad bit per word
STATE_BITS = 3

# Lane helper masks: one bit per entry at stride 3 within a word.
_LANE_LSB = sum(1 << (STATE_BITS * k) for k in range(ENTRIES_PER_WORD))
_WORD_BITS = STATE_BITS * ENTRIES_PER_WORD


class StateCode(enum.IntEnum):
    """The eight 3-bit lifecycle states."""

    IDLE = 0b000
    ACTIVE = 0b001
    PROMOTE_CANDIDATE = 0b010
    DEMOTE_CANDIDATE = 0b011
    PERSISTENT = 0b100
    DEFERRED = 0b101
    MARKED = 0b110
    EXPIRED = 0b111


class Action(enum.Enum):
    WAIT_SLEEP = "wait/sleep"
    KEEP_ALIVE = "keep alive"
    EVALUATE = "evaluate"
    KEEP_STAY = "keep stay"
    DEFER_SWEEP = "defer sweep"
    PREPARE_DELETE = "prepare for deletion"
    RECLAIM_IMMEDIATELY = "reclaim immediately"


# Total mapping from state to the action the runtime takes on it.
ACTION_FOR_STATE: dict[StateCode, Action] = {
    StateCode.IDLE: Action.WAIT_SLEEP,
    StateCode.ACTIVE: Action.KEEP_ALIVE,
    StateCode.PROMOTE_CANDIDATE: Action.EVALUATE,
    StateCode.DEMOTE_CANDIDATE: Action.EVALUATE,
    StateCode.PERSISTENT: Action.KEEP_STAY,
    StateCode.DEFERRED: Action.DEFER_SWEEP,
    StateCode.MARKED: Action.PREPARE_DELETE,
    StateCode.EXPIRED: Action.RECLAIM_IMMEDIATELY,
}


@dataclass(frozen=True)
class Signals:
    """Lifecycle signals observed for one object since the last step."""

    accessed: bool = False
    persistent: bool = False
    sweep_scheduled: bool = False
    expired: bool = False


def step_state(current: StateCode, signals: Signals) -> tuple[StateCode, Action]:
    """Advance one entry's state by the observed signals.

    Signal priority is expired, then sweep_scheduled, then persistent, then
    accessed. With no signal the entry falls back to idle, except a deferred
    entry, which holds its state until confirmation.
    """
    if signals.expired and signals.accessed:
        raise SignalConflictError("object signalled both expired and accessed")
    if signals.expired:
        nxt = StateCode.EXPIRED
    elif signals.sweep_scheduled:
        nxt = StateCode.MARKED
    elif signals.persistent:
        nxt = StateCode.PERSISTENT
    elif signals.accessed:
        nxt = StateCode.ACTIVE
    elif current is StateCode.DEFERRED:
        nxt = StateCode.DEFERRED
    else:
        nxt = StateCode.IDLE
    return nxt, ACTION_FOR_STATE[nxt]


def index_of(address: int, base: int, capacity: int | None = None) -> int:
    """Table index of a slot address: (address - base) / 16."""
    offset = address - base
    if offset < 0:
        raise IndexRangeError(f"address {address:#x} below base {base:#x}")
    if offset % SLOT_BYTES:
        raise AlignmentError(
            f"address offset {offset} not aligned to {SLOT_BYTES} bytes"
        )
    index = offset // SLOT_BYTES
    if capacity is not None and index >= capacity:
        raise IndexRangeError(f"index {index} beyond capacity {capacity}")
    return index


def address_of(index: int, base: int) -> int:
    """Inverse of index_of for non-negative indices."""
    if index < 0:
        raise IndexRangeError(f"negative index {index}")
    return base + SLOT_BYTES * index


@dataclass
class SweepReport:
    evaluated: int
    reclaimed: list[int]
    candidates: list[int] = field(default_factory=list)


class CheckpointTable:
    """Word-packed array of 3-bit states covering all three zone regions."""

    def __init__(self, layout: ZoneLayout, base: int = 0) -> None:
        self.layout = layout
        self.base = base
        self.capacity = layout.total
        self.epoch = 0
        nwords = (self.capacity + ENTRIES_PER_WORD - 1) // ENTRIES_PER_WORD
        self._words = [0] * nwords
        self._zone_lanes: dict[ZoneId, list[int]] | None = None
        self._valid_lanes: list[int] | None = None

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.capacity:
            raise IndexRangeError(f"index {i} outside table of {self.capacity} entries")

    def get_state(self, i: int) -> StateCode:
        self._check_index(i)
        w, lane = divmod(i, ENTRIES_PER_WORD)
        return StateCode((self._words[w] >> (STATE_BITS * lane)) & 0b111)

    def set_state(self, i: int, code: int) -> None:
        self._check_index(i)
        if not 0 <= code <= 0b111:
            raise ValueError(f"state code {code} outside 3 bits")
        w, lane = divmod(i, ENTRIES_PER_WORD)
        shift = STATE_BITS * lane
        words = self._words
        words[w] = (words[w] & ~(0b111 << shift)) | (code << shift)

    def states(self) -> Iterator[StateCode]:
        for i in range(self.capacity):
            yield self.get_state(i)

    def index_of(self, address: int) -> int:
        return index_of(address, self.base, self.capacity)

    def address_of(self, index: int) -> int:
        self._check_index(index)
        return address_of(index, self.base)

    def _lane_masks(self) -> tuple[dict[ZoneId, list[int]], list[int]]:
        """Per-word lane bitmasks for zone membership and valid entries."""
        if self._zone_lanes is None:
            nwords = len(self._words)
            zone_lanes = {z: [0] * nwords for z in ZONE_ORDER}
            valid = [0] * nwords
            for zone in ZONE_ORDER:
                lo, hi = self.layout.span(zone)
                for i in range(lo, hi):
                    w, lane = divmod(i, ENTRIES_PER_WORD)
                    bit = 1 << (STATE_BITS * lane)
                    zone_lanes[zone][w] |= bit
                    valid[w] |= bit
            self._zone_lanes = zone_lanes
            self._valid_lanes = valid
        return self._zone_lanes, self._valid_lanes  # type: ignore[return-value]

    def epoch_sweep(self, zone_active: Mapping[ZoneId, bool] | None = None) -> SweepReport:
        """Evaluate retention for every entry and report, without mutating.

        The zone activation bit is broadcast across each region; the pending
        bit is derived per entry (deferred state). An entry whose state
        self-asserts liveness (active or persistent) survives in an active
        zone; a deferred entry survives through the pending path; an expired
        entry that evaluates dead is reported reclaimable. Promotion and
        demotion candidates are reported for re-classification. Reclamation
        itself is the slot owner's job, so pool accounting stays in one place.
        """
        if zone_active is None:
            zone_active = {z: True for z in ZONE_ORDER}
        zone_lanes, valid_lanes = self._lane_masks()
        active_masks = [
            zone_lanes[z] if zone_active.get(z, False) else None for z in ZONE_ORDER
        ]
        reclaimed: list[int] = []
        candidates: list[int] = []
        lane_lsb = _LANE_LSB
        for w, word in enumerate(self._words):
            valid = valid_lanes[w]
            if not valid:
                continue
            s0 = word & lane_lsb
            s1 = (word >> 1) & lane_lsb
            s2 = (word >> 2) & lane_lsb
            # States 001 and 100 assert liveness on their own.
            live = (s0 & ~s1 & ~s2) | (s2 & ~s1 & ~s0)
            pending = s2 & ~s1 & s0  # state 101
            zmask = 0
            for zl in active_masks:
                if zl is not None:
                    zmask |= zl[w]
            out = eval_liveness_gate(live & valid, zmask, pending & valid, _WORD_BITS)
            dead = valid & ~out
            reclaim_lanes = dead & s0 & s1 & s2  # dead and state 111
            candidate_lanes = valid & s1 & ~s2  # states 010 and 011
            base_index = w * ENTRIES_PER_WORD
            while reclaim_lanes:
                low = reclaim_lanes & -reclaim_lanes
                reclaimed.append(base_index + low.bit_length() // STATE_BITS)
                reclaim_lanes ^= low
            while candidate_lanes:
                low = candidate_lanes & -candidate_lanes
                candidates.append(base_index + low.bit_length() // STATE_BITS)
                candidate_lanes ^= low
        self.epoch += 1
        return SweepReport(self.capacity, reclaimed, candidates)


def dump_snapshot(table: CheckpointTable) -> str:
    """Debug dump: one `index state zone generation` line per non-idle entry."""
    layout = table.layout
    lines = []
    for i in range(table.capacity):
        state = table.get_state(i)
        if state is StateCode.IDLE:
            continue
        zone = layout.zone_of_index(i)
        gen = layout.generation_of(i)
        lines.append(f"{i} {state:03b} {zone} Gen{int(gen)}")
    return "\n".join(lines)
