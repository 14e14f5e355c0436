"""Auxiliary information carried in bit plane n+1 of the border pixels.

Layout (66 bits, big-endian fields): predictor N (2), payload length L (32),
row of C_end (16), column of C_end (16). With repetition ``r`` the 66 bits
are spread over the first ``66 * r`` border pixels in raster order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corpus import GrayImage, as_bits
from ..errors import CapacityError, CorruptAuxError
from ..hardening import majority_aux, spread_aux
from .cells import classify_cells

AUX_BITS = 66
_FIELDS = (("N", 2), ("payload_len", 32), ("row", 16), ("col", 16))


@dataclass(frozen=True)
class AuxInfo:
    N: int
    payload_len: int
    c_end: tuple[int, int]

    def to_bits(self) -> np.ndarray:
        values = {"N": self.N, "payload_len": self.payload_len, "row": self.c_end[0], "col": self.c_end[1]}
        out = []
        for name, width in _FIELDS:
            v = values[name]
            if not 0 <= v < (1 << width):
                raise ValueError(f"aux field {name}={v} does not fit in {width} bits")
            out.extend((v >> s) & 1 for s in range(width - 1, -1, -1))
        return np.array(out, dtype=np.uint8)

    @classmethod
    def from_bits(cls, bits) -> "AuxInfo":
        bits = as_bits(bits)
        if bits.size != AUX_BITS:
            raise ValueError(f"expected {AUX_BITS} aux bits, got {bits.size}")
        values, pos = {}, 0
        for name, width in _FIELDS:
            v = 0
            for b in bits[pos : pos + width].tolist():
                v = (v << 1) | b
            values[name] = v
            pos += width
        return cls(values["N"], values["payload_len"], (values["row"], values["col"]))


def aux_positions(h: int, w: int, r: int = 1) -> list[tuple[int, int]]:
    """Border pixels that carry the (spread) aux bits."""
    border = classify_cells(h, w).border
    need = AUX_BITS * r
    if len(border) < need:
        raise CapacityError(f"{h}x{w} image has {len(border)} border pixels, aux needs {need}")
    return list(border[:need])


def write_aux(image: GrayImage, aux: AuxInfo, n: int, r: int = 1) -> tuple[GrayImage, np.ndarray]:
    """Substitute plane n+1 of the aux pixels; returns the new image and the overwritten bits."""
    if not 1 <= n <= 7:
        raise ValueError(f"aux plane n+1 needs n in [1, 7], got {n}")
    pos = aux_positions(image.height, image.width, r)
    rows, cols = np.array(pos).T
    bits = spread_aux(aux.to_bits(), r)
    p = image.to_array()
    saved = ((p[rows, cols] >> n) & 1).astype(np.uint8)
    p[rows, cols] = (p[rows, cols] & ~(1 << n)) | (bits.astype(np.int64) << n)
    return GrayImage(p), saved


def read_aux_bits(image: GrayImage, n: int, r: int = 1) -> np.ndarray:
    """Raw (undecided) aux bits as stored, ``66 * r`` of them."""
    rows, cols = np.array(aux_positions(image.height, image.width, r)).T
    return ((image.pixels[rows, cols] >> n) & 1).astype(np.uint8)


def read_aux(image: GrayImage, n: int, r: int = 1) -> AuxInfo:
    """Majority-decode the aux bits and sanity-check them against the image."""
    aux = AuxInfo.from_bits(majority_aux(read_aux_bits(image, n, r), r))
    h, w = image.shape
    if aux.N not in (1, 2, 3):
        raise CorruptAuxError(f"predictor number {aux.N} is invalid")
    i, j = aux.c_end
    if not (0 < i < h - 1 and 0 < j < w - 1):
        raise CorruptAuxError(f"C_end {aux.c_end} lies outside the interior of a {h}x{w} image")
    return aux
