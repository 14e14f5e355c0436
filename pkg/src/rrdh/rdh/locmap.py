"""Overflow preprocessing and the run-length coded location map.

Map wire format: a sequence of 17-bit records, each a 16-bit big-endian run
length (1..65535) followed by the run's bit value, packed MSB-first and
zero-padded to a whole byte. Runs longer than 65535 are split.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..corpus import as_bits
from ..errors import MapDecodeError
from .cells import CellMap

RUN_BITS = 16
RECORD_BITS = RUN_BITS + 1
MAX_RUN = (1 << RUN_BITS) - 1


def compress_map(flags) -> bytes:
    flags = as_bits(flags)
    if flags.size == 0:
        return b""
    change = np.flatnonzero(np.diff(flags)) + 1
    starts = np.concatenate(([0], change))
    lengths = np.diff(np.concatenate((starts, [flags.size])))
    records = []
    for start, length in zip(starts.tolist(), lengths.tolist()):
        value = int(flags[start])
        while length:
            chunk = min(length, MAX_RUN)
            records.append((chunk << 1) | value)
            length -= chunk
    rec = np.array(records, dtype=np.uint32)
    shifts = np.arange(RECORD_BITS - 1, -1, -1, dtype=np.uint32)
    bits = ((rec[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)
    return np.packbits(bits).tobytes()


def decompress_map(data: bytes) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
    n_rec, tail = divmod(bits.size, RECORD_BITS)
    if tail >= 8 or bits[bits.size - tail :].any():
        raise MapDecodeError("location map has trailing garbage")
    if n_rec == 0:
        return np.zeros(0, dtype=np.uint8)
    rec = bits[: n_rec * RECORD_BITS].reshape(n_rec, RECORD_BITS).astype(np.int64)
    lengths = rec[:, :RUN_BITS] @ (1 << np.arange(RUN_BITS - 1, -1, -1))
    if (lengths == 0).any():
        raise MapDecodeError("zero-length run in location map")
    return np.repeat(rec[:, RUN_BITS].astype(np.uint8), lengths)


def offset_width(margin: int) -> int:
    """Bits needed to store how far a moved value sat inside the margin."""
    return (margin - 1).bit_length()


@dataclass
class LocationMap:
    """Preprocessing record for the interior pixels, raster order.

    ``flags[k] == 1`` means interior pixel ``k`` was pulled inside the safe
    range. ``offsets`` holds, per flagged pixel, its distance from the
    nearest range end (always 0 when the margin is 1).
    """

    flags: np.ndarray
    margin: int = 1
    offsets: list[int] = field(default_factory=list)

    @property
    def compressed(self) -> bytes:
        return compress_map(self.flags)

    def offset_bits(self) -> np.ndarray:
        width = offset_width(self.margin)
        if width == 0 or not self.offsets:
            return np.zeros(0, dtype=np.uint8)
        shifts = np.arange(width - 1, -1, -1)
        return ((np.array(self.offsets)[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)

    @staticmethod
    def decode_offsets(bits, count: int, margin: int) -> list[int]:
        width = offset_width(margin)
        if width == 0:
            return [0] * count
        b = as_bits(bits)[: count * width].astype(np.int64)
        if b.size != count * width:
            raise MapDecodeError("not enough preprocessing offset bits")
        return (b.reshape(count, width) @ (1 << np.arange(width - 1, -1, -1))).tolist()


def preprocess(msb: np.ndarray, cells: CellMap, vmax: int, margin: int = 1, mask=None):
    """Pull interior values into ``[margin, vmax - margin]``.

    Values below the range are set to ``margin``, values above to
    ``vmax - margin``; each moved pixel is flagged. Pixels where ``mask`` is
    False are left alone. Returns ``(msb', LocationMap)``.
    """
    if vmax < 2 * margin + 1:
        raise ValueError(f"MSB range [0, {vmax}] is too narrow for margin {margin}")
    out = np.array(msb, dtype=np.int64, copy=True)
    interior = cells.interior
    flags = np.zeros(len(interior), dtype=np.uint8)
    offsets = []
    hi = vmax - margin
    for k, (i, j) in enumerate(interior):
        if mask is not None and not mask[i, j]:
            continue
        v = out[i, j]
        if v < margin:
            flags[k] = 1
            offsets.append(int(v))
            out[i, j] = margin
        elif v > hi:
            flags[k] = 1
            offsets.append(int(vmax - v))
            out[i, j] = hi
    return out, LocationMap(flags, margin, offsets)


def undo_preprocess(msb: np.ndarray, cells: CellMap, vmax: int, locmap: LocationMap) -> np.ndarray:
    out = np.array(msb, dtype=np.int64, copy=True)
    interior = cells.interior
    if len(locmap.flags) != len(interior):
        raise MapDecodeError(f"location map has {len(locmap.flags)} flags, image has {len(interior)} interior pixels")
    flagged = np.flatnonzero(locmap.flags)
    if len(flagged) != len(locmap.offsets):
        raise MapDecodeError("flag count and offset count disagree")
    lo, hi = locmap.margin, vmax - locmap.margin
    for k, off in zip(flagged.tolist(), locmap.offsets):
        i, j = interior[k]
        if out[i, j] == lo:
            out[i, j] = off
        elif out[i, j] == hi:
            out[i, j] = vmax - off
        else:
            raise MapDecodeError(f"flagged pixel {(i, j)} holds {out[i, j]}, expected {lo} or {hi}")
    return out
