"""Runtime configuration: one flat dataclass, a plain-text key-value loader,
and factory helpers that assemble the configured runtime pieces.

File format: one `key = value` per line, `#` starts a comment, blank lines
ignored. Keys are dotted paths, for example:

    zones.green = 2048
    simple.access_red = 10
    cost.blue.stage = 1.0
    pause.red = 0.5
    policy = simple
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError
from .layout import ZoneId, ZoneLayout
from .objects import EmaConfig, LogicalClock
from .zones import (
    CostParams,
    PredicateThresholds,
    RateThresholds,
    ZoneArena,
    ZoneWeights,
)


@dataclass(frozen=True)
class RuntimeConfig:
    # table layout
    zone_red: int = 1024
    zone_green: int = 1024
    zone_blue: int = 1024
    gen_fraction0: float = 0.25
    gen_fraction1: float = 0.75
    partitions_red: int = 1
    partitions_green: int = 1
    partitions_blue: int = 1
    # metrics and lifecycle
    policy: str = "simple"
    pool_discipline: str = "lifo"
    rate_window: float = 1.0
    ema_weight: float = 0.5
    seconds_per_op: float = 1e-6
    sweep_interval: int = 500
    # rate-policy thresholds
    simple_access_red: float = 10.0
    simple_access_green: float = 100.0
    simple_mutation_red: float = 10.0
    simple_mutation_green: float = 100.0
    # predicate-policy thresholds
    predicate_lifetime_red: float = 0.1
    predicate_lifetime_green: float = 10.0
    predicate_mutation_red: float = 100.0
    predicate_mutation_green: float = 10.0
    predicate_access_red: float = 100.0
    predicate_access_green: float = 10.0
    predicate_size_red: float = 256.0
    predicate_size_green: float = 4096.0
    # cost model
    cost_red_mark: float = 1.0
    cost_red_scan: float = 1.0
    cost_red_stage: float = 4.0
    cost_green_mark: float = 1.0
    cost_green_scan: float = 0.8
    cost_green_stage: float = 2.0
    cost_blue_mark: float = 0.5
    cost_blue_scan: float = 0.5
    cost_blue_stage: float = 1.0
    cost_mark_tolerance: float = 0.25
    pause_red: float = 0.5
    pause_green: float = 0.3
    pause_blue: float = 0.2
    # scheduler
    eta_red: float = 0.9
    eta_green: float = 0.9
    eta_blue: float = 0.9
    delta_red: float = 1.0
    delta_green: float = 1.0
    delta_blue: float = 1.0
    rebalance_factor: float = 1.5
    rebalance_normalize: bool = True
    cores: int | None = None
    # yield memory
    scratch_slots: int = 4096
    scratch_bytes: int = 4096 * 16
    # bench harness
    max_recursion_depth: int = 32000
    chi_loop: float = 1.0
    chi_recursion: float = 2.0
    chi_matrix: float = 4.0

    # -- factories ----------------------------------------------------------

    def layout(self) -> ZoneLayout:
        return ZoneLayout(
            self.zone_red,
            self.zone_green,
            self.zone_blue,
            gen0_fraction=self.gen_fraction0,
            gen1_fraction=self.gen_fraction1,
            partitions={
                ZoneId.RED: self.partitions_red,
                ZoneId.GREEN: self.partitions_green,
                ZoneId.BLUE: self.partitions_blue,
            },
        )

    def ema(self) -> EmaConfig:
        return EmaConfig(self.ema_weight)

    def clock(self) -> LogicalClock:
        return LogicalClock(self.seconds_per_op)

    def rate_thresholds(self) -> RateThresholds:
        return RateThresholds(
            self.simple_access_red,
            self.simple_access_green,
            self.simple_mutation_red,
            self.simple_mutation_green,
        )

    def predicate_thresholds(self) -> PredicateThresholds:
        return PredicateThresholds(
            self.predicate_lifetime_red,
            self.predicate_lifetime_green,
            self.predicate_mutation_red,
            self.predicate_mutation_green,
            self.predicate_access_red,
            self.predicate_access_green,
            self.predicate_size_red,
            self.predicate_size_green,
        )

    def cost_params(self) -> CostParams:
        return CostParams(
            weights={
                ZoneId.RED: ZoneWeights(
                    self.cost_red_mark, self.cost_red_scan, self.cost_red_stage
                ),
                ZoneId.GREEN: ZoneWeights(
                    self.cost_green_mark, self.cost_green_scan, self.cost_green_stage
                ),
                ZoneId.BLUE: ZoneWeights(
                    self.cost_blue_mark, self.cost_blue_scan, self.cost_blue_stage
                ),
            },
            pause_fraction={
                ZoneId.RED: self.pause_red,
                ZoneId.GREEN: self.pause_green,
                ZoneId.BLUE: self.pause_blue,
            },
            mark_tolerance=self.cost_mark_tolerance,
        )

    def eta(self) -> tuple[float, float, float]:
        return (self.eta_red, self.eta_green, self.eta_blue)

    def delta(self) -> tuple[float, float, float]:
        return (self.delta_red, self.delta_green, self.delta_blue)

    def complexity_of(self, kind: str) -> float:
        return {
            "loop": self.chi_loop,
            "recursion": self.chi_recursion,
            "deep_recursion": self.chi_recursion,
            "matrix": self.chi_matrix,
        }.get(kind, 1.0)

    def build_arena(self) -> ZoneArena:
        return ZoneArena(
            self.layout(),
            clock=self.clock(),
            rate_window=self.rate_window,
            ema=self.ema(),
            rate_thresholds=self.rate_thresholds(),
            predicate_thresholds=self.predicate_thresholds(),
            costs=self.cost_params(),
            policy=self.policy,
            pool_discipline=self.pool_discipline,
        )


# Dotted config key -> dataclass field. The long way around a naming DSL.
_KEY_TO_FIELD = {
    "zones.red": "zone_red",
    "zones.green": "zone_green",
    "zones.blue": "zone_blue",
    "gen.fraction0": "gen_fraction0",
    "gen.fraction1": "gen_fraction1",
    "partitions.red": "partitions_red",
    "partitions.green": "partitions_green",
    "partitions.blue": "partitions_blue",
    "policy": "policy",
    "pool_discipline": "pool_discipline",
    "rate_window": "rate_window",
    "ema_weight": "ema_weight",
    "seconds_per_op": "seconds_per_op",
    "sweep_interval": "sweep_interval",
    "simple.access_red": "simple_access_red",
    "simple.access_green": "simple_access_green",
    "simple.mutation_red": "simple_mutation_red",
    "simple.mutation_green": "simple_mutation_green",
    "predicate.lifetime_red": "predicate_lifetime_red",
    "predicate.lifetime_green": "predicate_lifetime_green",
    "predicate.mutation_red": "predicate_mutation_red",
    "predicate.mutation_green": "predicate_mutation_green",
    "predicate.access_red": "predicate_access_red",
    "predicate.access_green": "predicate_access_green",
    "predicate.size_red": "predicate_size_red",
    "predicate.size_green": "predicate_size_green",
    "cost.red.mark": "cost_red_mark",
    "cost.red.scan": "cost_red_scan",
    "cost.red.stage": "cost_red_stage",
    "cost.green.mark": "cost_green_mark",
    "cost.green.scan": "cost_green_scan",
    "cost.green.stage": "cost_green_stage",
    "cost.blue.mark": "cost_blue_mark",
    "cost.blue.scan": "cost_blue_scan",
    "cost.blue.stage": "cost_blue_stage",
    "cost.mark_tolerance": "cost_mark_tolerance",
    "pause.red": "pause_red",
    "pause.green": "pause_green",
    "pause.blue": "pause_blue",
    "eta.red": "eta_red",
    "eta.green": "eta_green",
    "eta.blue": "eta_blue",
    "delta.red": "delta_red",
    "delta.green": "delta_green",
    "delta.blue": "delta_blue",
    "rebalance.factor": "rebalance_factor",
    "rebalance.normalize": "rebalance_normalize",
    "cores": "cores",
    "scratch.slots": "scratch_slots",
    "scratch.bytes": "scratch_bytes",
    "max_recursion_depth": "max_recursion_depth",
    "chi.loop": "chi_loop",
    "chi.recursion": "chi_recursion",
    "chi.matrix": "chi_matrix",
}

_FIELD_TYPES = {f.name: f.type for f in fields(RuntimeConfig)}


def _convert(key: str, field_name: str, raw: str):
    ftype = _FIELD_TYPES[field_name]
    raw = raw.strip()
    try:
        if ftype == "bool":
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if ftype == "int":
            return int(raw)
        if ftype == "int | None":
            return None if raw.lower() in ("none", "auto") else int(raw)
        if ftype == "float":
            return float(raw)
        return raw  # str fields
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc


def parse_config(text: str, base: RuntimeConfig | None = None) -> RuntimeConfig:
    """Apply key-value overrides from `text` on top of `base` (or defaults)."""
    cfg = base or RuntimeConfig()
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        field_name = _KEY_TO_FIELD.get(key)
        if field_name is None:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        overrides[field_name] = _convert(key, field_name, raw)
    return replace(cfg, **overrides)


def load_config(path: str | Path, base: RuntimeConfig | None = None) -> RuntimeConfig:
    return parse_config(Path(path).read_text(), base)
