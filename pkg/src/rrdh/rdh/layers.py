"""Two-layer prediction-error expansion on MSB working values, and its inverse.

Layer 1 expands the error against the low-side prediction and only ever
moves a value up by one; layer 2 expands against the high-side prediction and
only ever moves it down by one. A missing bit (``None``) at a carrier
position embeds 0 and consumes nothing, which is how the final pixel of a
pass is padded.
"""

from __future__ import annotations

from ..bitplane import check_msb_value as _checked


def embed_layer1(v: int, p1: int, next_bit=None, vmax: int | None = None) -> tuple[int, int]:
    e = v - p1
    if e == 1:
        if next_bit is None:
            return _checked(v, vmax), 0
        return _checked(v + next_bit, vmax), 1
    if e > 1:
        return _checked(v + 1, vmax), 0
    return _checked(v, vmax), 0


def embed_layer2(v: int, p2: int, next_bit=None, vmax: int | None = None) -> tuple[int, int]:
    e = v - p2
    if e == -1:
        if next_bit is None:
            return _checked(v, vmax), 0
        return _checked(v - next_bit, vmax), 1
    if e < -1:
        return _checked(v - 1, vmax), 0
    return _checked(v, vmax), 0


def extract_layer2(v: int, p2: int) -> tuple[int, int | None]:
    d = v - p2
    if d >= 0:
        return v, None
    if d == -1:
        return v, 0
    if d == -2:
        return v + 1, 1
    return v + 1, None


def extract_layer1(v: int, p1: int) -> tuple[int, int | None]:
    d = v - p1
    if d <= 0:
        return v, None
    if d == 1:
        return v, 0
    if d == 2:
        return v - 1, 1
    return v - 1, None
