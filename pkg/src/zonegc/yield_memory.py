"""Ephemeral execution path bypassing zones and checkpoint tracking.

Short-lived values evaluate inside a bounded scratch scope and vanish when it
closes; nothing they do touches the table or the pools. A value that must
outlive the scope is promoted explicitly, at which point it enters the arena
under one of the two long-lived state codes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable

from .checkpoint import StateCode
from .errors import EphemeralStateError, LifecycleError, PromotionError, YieldOverflowError
from .layout import SLOT_BYTES, ZoneId
from .objects import FeatureVector
from .zones import ZoneArena


class EphemeralState(enum.IntEnum):
    """The four state codes an ephemeral value may carry."""

    DISCARD = 0b000  # dropped as soon as evaluation finishes
    SCOPED = 0b001  # referenced while the scope stays open, then dropped
    PERSISTENT = 0b100  # survives the scope in the green zone
    DEFERRED = 0b101  # survives the scope, zone decided at promotion


class PromotionTarget(enum.Enum):
    NO_ZONE = "no-zone"
    GREEN = "green"
    RED_OR_BLUE = "red-or-blue"


def promotion_target(state: int) -> PromotionTarget:
    """Where a given ephemeral state code routes on scope exit."""
    try:
        state = EphemeralState(state)
    except ValueError:
        raise EphemeralStateError(
            f"state {state:#05b} is not an ephemeral-value code"
        ) from None
    if state in (EphemeralState.DISCARD, EphemeralState.SCOPED):
        return PromotionTarget.NO_ZONE
    if state is EphemeralState.PERSISTENT:
        return PromotionTarget.GREEN
    return PromotionTarget.RED_OR_BLUE


@dataclass
class YieldScope:
    """Bounded scratch region for ephemeral evaluation.

    Slot and byte budgets cap concurrently held scratch; a nested evaluation
    chain deeper than the budget overflows rather than growing silently.
    Use as a context manager to get the close-time guarantees.
    """

    arena: ZoneArena | None = None
    scope_id: str = "yield"
    capacity_slots: int = 4096
    capacity_bytes: int = 4096 * SLOT_BYTES
    slots_in_use: int = 0
    bytes_in_use: int = 0
    promoted: list[tuple[Any, EphemeralState]] = field(default_factory=list)
    open: bool = True

    def __enter__(self) -> "YieldScope":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    def close(self) -> None:
        self.open = False
        self.slots_in_use = 0
        self.bytes_in_use = 0

    def yield_eval(self, thunk: Callable[[], Any], *, slots: int = 1,
                   nbytes: int = 0) -> Any:
        """Run a thunk on scratch only; no table entry, no zone counters."""
        if not self.open:
            raise LifecycleError(f"scope {self.scope_id} is closed")
        if (self.slots_in_use + slots > self.capacity_slots
                or self.bytes_in_use + nbytes > self.capacity_bytes):
            raise YieldOverflowError(
                f"scope {self.scope_id} scratch exhausted "
                f"({self.slots_in_use}/{self.capacity_slots} slots)"
            )
        self.slots_in_use += slots
        self.bytes_in_use += nbytes
        try:
            return thunk()
        finally:
            self.slots_in_use -= slots
            self.bytes_in_use -= nbytes

    def promote(self, value: Any, state: int, *, site_tag: str | None = None,
                features: FeatureVector | None = None):
        """Register a surviving value with the arena.

        Persistent values go to green; deferred values are classified on the
        spot with a green verdict clamped to blue, so the outcome stays in
        red-or-blue. The new entry carries the ephemeral state code.
        """
        if not self.open:
            raise LifecycleError(f"scope {self.scope_id} is closed")
        target = promotion_target(state)
        if target is PromotionTarget.NO_ZONE:
            raise PromotionError(
                f"state {state:03b} does not outlive the scope; nothing to promote"
            )
        if self.arena is None:
            raise LifecycleError("scope has no arena to promote into")
        f = features or FeatureVector()
        if target is PromotionTarget.GREEN:
            zone = ZoneId.GREEN
        else:
            zone = self.arena.classify(f)
            if zone is ZoneId.GREEN:
                zone = ZoneId.BLUE
        handle = self.arena.allocate(
            zone,
            site_tag or self.scope_id,
            size=f.size,
            fan_out=f.fan_out,
            complexity_weight=f.complexity_weight,
        )
        self.arena.table.set_state(handle.slot_index, StateCode(state))
        self.promoted.append((value, EphemeralState(state)))
        return handle
