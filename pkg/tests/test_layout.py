"""Index geometry: regions, generations, partitions."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zonegc.errors import IndexRangeError
from zonegc.layout import SLOT_BYTES, Generation, ZoneId, ZoneLayout

from .oracles import (
    check_partition_properties,
    generation_scan_oracle,
    zone_scan_oracle,
)

LETTER = {ZoneId.RED: "R", ZoneId.GREEN: "G", ZoneId.BLUE: "B"}


def test_slot_granularity_constant():
    assert SLOT_BYTES == 16


def test_zone_identity_basics():
    assert [z.value for z in ZoneId] == ["R", "G", "B"]
    assert str(ZoneId.GREEN) == "G"
    assert ZoneId("B") is ZoneId.BLUE
    assert [z.ordinal for z in ZoneId] == [0, 1, 2]


def test_layout_regions_are_contiguous_in_order():
    layout = ZoneLayout(5, 7, 3)
    assert layout.total == 15
    assert layout.span(ZoneId.RED) == (0, 5)
    assert layout.span(ZoneId.GREEN) == (5, 12)
    assert layout.span(ZoneId.BLUE) == (12, 15)
    assert layout.start(ZoneId.BLUE) == 12
    assert layout.size(ZoneId.GREEN) == 7


def test_layout_validation():
    with pytest.raises(ValueError):
        ZoneLayout(0, 1, 1)  # every zone needs at least one slot
    with pytest.raises(ValueError):
        ZoneLayout(4, 4, 4, gen0_fraction=0.75, gen1_fraction=0.25)
    with pytest.raises(ValueError):
        ZoneLayout(4, 4, 4, gen0_fraction=0.0)
    with pytest.raises(ValueError):
        ZoneLayout(4, 4, 4, partitions={ZoneId.RED: 5, ZoneId.GREEN: 1,
                                        ZoneId.BLUE: 1})  # P > N
    with pytest.raises(ValueError):
        ZoneLayout(4, 4, 4, partitions={ZoneId.RED: 0, ZoneId.GREEN: 1,
                                        ZoneId.BLUE: 1})


def test_zone_of_index_bounds():
    layout = ZoneLayout(2, 2, 2)
    with pytest.raises(IndexRangeError):
        layout.zone_of_index(-1)
    with pytest.raises(IndexRangeError):
        layout.zone_of_index(6)


@settings(max_examples=120, deadline=None)
@given(sizes=st.tuples(*[st.integers(1, 64)] * 3))
def test_zone_mapping_matches_linear_scan(sizes):
    layout = ZoneLayout(*sizes)
    for i in range(layout.total):
        assert LETTER[layout.zone_of_index(i)] == zone_scan_oracle(i, *sizes)


@settings(max_examples=120, deadline=None)
@given(
    sizes=st.tuples(*[st.integers(1, 64)] * 3),
    frac0=st.floats(min_value=0.05, max_value=0.45),
    frac1=st.floats(min_value=0.5, max_value=0.95),
)
def test_generation_mapping_matches_linear_scan(sizes, frac0, frac1):
    layout = ZoneLayout(*sizes, gen0_fraction=frac0, gen1_fraction=frac1)
    for zone in ZoneId:
        lo, hi = layout.span(zone)
        for i in range(lo, hi):
            expected = generation_scan_oracle(i - lo, hi - lo, frac0, frac1)
            assert int(layout.generation_of(i)) == expected


def test_generation_default_fractions_quartiles():
    layout = ZoneLayout(8, 8, 8)  # cuts at 2 and 6 inside each zone
    gens = [int(layout.generation_of(i)) for i in range(8)]
    assert gens == [0, 0, 1, 1, 1, 1, 2, 2]


@settings(max_examples=120, deadline=None)
@given(
    sizes=st.tuples(*[st.integers(1, 64)] * 3),
    parts=st.tuples(*[st.integers(1, 8)] * 3),
)
def test_partition_ranges_tile_each_zone(sizes, parts):
    caps = tuple(min(p, n) for p, n in zip(parts, sizes))
    layout = ZoneLayout(*sizes, partitions={ZoneId.RED: caps[0],
                                            ZoneId.GREEN: caps[1],
                                            ZoneId.BLUE: caps[2]})
    for zone, cap in zip(ZoneId, caps):
        ranges = layout.partition_ranges(zone)
        lo, hi = layout.span(zone)
        assert len(ranges) == cap
        rebased = [(a - lo, b - lo) for a, b in ranges]
        check_partition_properties(hi - lo, rebased)


def test_partition_ranges_explicit_case():
    layout = ZoneLayout(10, 4, 4, partitions={ZoneId.RED: 3, ZoneId.GREEN: 1,
                                              ZoneId.BLUE: 2})
    assert layout.partition_ranges(ZoneId.RED) == [(0, 3), (3, 6), (6, 10)]
    assert layout.partition_ranges(ZoneId.GREEN) == [(10, 14)]
    assert layout.partition_ranges(ZoneId.BLUE) == [(14, 16), (16, 18)]


def test_generation_enum_values():
    assert [int(g) for g in Generation] == [0, 1, 2]
