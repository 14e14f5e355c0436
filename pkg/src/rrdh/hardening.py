"""Robustness hardening: repeated auxiliary bits, raster scanning, wider shifts.

Shifted embedding
-----------------
With shift quantity ``T`` the decoder tolerates a perturbation of up to
``t = T // 2`` on every marked MSB value. To make that possible each layer
spreads its four output regions (left tail, bit 0, bit 1, right tail) so that
neighbouring regions are at least ``2t + 1`` apart:

=========  ===================  ==========================
layer 1    e1 = v - p1           marked value
=========  ===================  ==========================
left        e1 < 1               v - 2t
carrier     e1 = 1               v + (2t + 1) * bit
right       e1 > 1               v + 4t + 1
=========  ===================  ==========================

Layer 2 is the mirror image around ``p2 - 1``. For ``T = 1`` (t = 0) both
tables collapse to the plain unit-step expansion. A value moves by at most
``6t + 1`` over both layers, which is the preprocessing margin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitplane import check_msb_value as _checked
from .corpus import as_bits
from .errors import CapacityError

ORDERINGS = ("complexity", "raster")


@dataclass(frozen=True)
class HardeningConfig:
    r: int = 1
    ordering: str = "complexity"
    T: int = 1

    def __post_init__(self):
        if self.r < 1 or self.r % 2 == 0:
            raise ValueError(f"aux repetition r must be an odd integer >= 1, got {self.r}")
        if self.ordering not in ORDERINGS:
            raise ValueError(f"ordering must be one of {ORDERINGS}, got {self.ordering!r}")
        if self.T < 1:
            raise ValueError(f"shift T must be >= 1, got {self.T}")


# --------------------------------------------------------------------------
# repetition + majority vote


def spread_aux(aux_bits, r: int, capacity: int | None = None) -> np.ndarray:
    """Repeat every bit ``r`` times; copy ``j`` of bit ``i`` lands at ``j * len + i``."""
    bits = as_bits(aux_bits)
    if r < 1 or r % 2 == 0:
        raise ValueError(f"r must be odd and >= 1, got {r}")
    if capacity is not None and capacity < bits.size * r:
        raise CapacityError(f"{bits.size * r} aux bits do not fit in {capacity} border pixels")
    return np.tile(bits, r)


def majority_aux(received, r: int) -> np.ndarray:
    bits = as_bits(received)
    if r < 1 or r % 2 == 0:
        raise ValueError(f"r must be odd and >= 1, got {r}")
    if bits.size % r:
        raise ValueError(f"received length {bits.size} is not a multiple of r={r}")
    votes = bits.reshape(r, -1).sum(axis=0, dtype=np.int64)
    return (votes > r // 2).astype(np.uint8)


# --------------------------------------------------------------------------
# shifted two-layer expansion


def tolerance(T: int) -> int:
    return T // 2


def margin(T: int) -> int:
    """Largest total displacement of an MSB value over both layers."""
    return 6 * tolerance(T) + 1


def shifted_embed_layer1(v: int, p1: int, next_bit=None, T: int = 1, vmax: int | None = None):
    t = T // 2
    e = v - p1
    if e == 1:
        if next_bit is None:
            return _checked(v, vmax), 0
        return _checked(v + (2 * t + 1) * next_bit, vmax), 1
    if e > 1:
        return _checked(v + 4 * t + 1, vmax), 0
    return _checked(v - 2 * t, vmax), 0


def shifted_embed_layer2(v: int, p2: int, next_bit=None, T: int = 1, vmax: int | None = None):
    t = T // 2
    e = v - p2
    if e == -1:
        if next_bit is None:
            return _checked(v, vmax), 0
        return _checked(v - (2 * t + 1) * next_bit, vmax), 1
    if e < -1:
        return _checked(v - 4 * t - 1, vmax), 0
    return _checked(v + 2 * t, vmax), 0


def shifted_extract_layer1(v: int, p1: int, T: int = 1) -> tuple[int, int | None]:
    """Nearest-region decoding; carriers snap back to ``p1 + 1``."""
    t = T // 2
    d = v - p1
    if d <= -t:
        return v + 2 * t, None
    if d <= 1 + t:
        return p1 + 1, 0
    if d <= 2 + 3 * t:
        return p1 + 1, 1
    return v - 4 * t - 1, None


def shifted_extract_layer2(v: int, p2: int, T: int = 1) -> tuple[int, int | None]:
    t = T // 2
    d = v - p2
    if d >= t:
        return v - 2 * t, None
    if d >= -1 - t:
        return p2 - 1, 0
    if d >= -2 - 3 * t:
        return p2 - 1, 1
    return v + 4 * t + 1, None
