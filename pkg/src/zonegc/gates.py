"""Bitwise logic primitives for liveness evaluation.

Operands are plain ints treated as bit vectors of an explicit width; a value
needing more bits than the declared width is a shape violation. NOT, NAND and
NOR complement within the width, so every result stays inside the declared
lane count.
"""

from __future__ import annotations

from .errors import ShapeError


def mask(width: int) -> int:
    if width < 1:
        raise ShapeError(f"width must be >= 1, got {width}")
    return (1 << width) - 1


def _check(width: int, *operands: int) -> int:
    m = mask(width)
    for value in operands:
        if value < 0 or value > m:
            raise ShapeError(f"operand {value:#x} does not fit in {width} bit(s)")
    return m


def gate_and(a: int, b: int, width: int = 1) -> int:
    _check(width, a, b)
    return a & b


def gate_or(a: int, b: int, width: int = 1) -> int:
    _check(width, a, b)
    return a | b


def gate_not(a: int, width: int = 1) -> int:
    return _check(width, a) & ~a


def gate_xor(a: int, b: int, width: int = 1) -> int:
    _check(width, a, b)
    return a ^ b


def gate_xnor(a: int, b: int, width: int = 1) -> int:
    return _check(width, a, b) & ~(a ^ b)


def gate_nand(a: int, b: int, width: int = 1) -> int:
    return _check(width, a, b) & ~(a & b)


def gate_nor(a: int, b: int, width: int = 1) -> int:
    return _check(width, a, b) & ~(a | b)


def eval_liveness_gate(state: int, zone_mask: int, pending: int, width: int = 1) -> int:
    """Retention decision (state AND zone) OR (NOT state AND pending), lanewise.

    A set output lane means the lane's object is retained; a clear lane means
    it evaluates dead and may be acted on by the sweep.
    """
    m = _check(width, state, zone_mask, pending)
    return (state & zone_mask) | (m & ~state & pending)


def zone_mask_update(r: int, g: int, b: int, width: int = 1) -> tuple[int, int, int]:
    """One update step of the three zone activation masks, lanewise.

    r' = (r and not b) or (r and g)
    g' = (g or r) and not b
    b' = b and not g

    The cross terms keep a lane from being claimed by two zones at once.
    """
    m = _check(width, r, g, b)
    not_b = m & ~b
    r_next = (r & not_b) | (r & g)
    g_next = (g | r) & not_b
    b_next = b & (m & ~g)
    return r_next, g_next, b_next


def transition_detect(prev: int, cur: int, width: int = 3) -> tuple[int, int]:
    """(changed, stable) single-bit pair for two state words.

    changed reduces the lanewise XOR to any-bit-set; stable is its complement
    (the all-lanes XNOR).
    """
    _check(width, prev, cur)
    changed = 1 if prev ^ cur else 0
    return changed, 1 - changed
