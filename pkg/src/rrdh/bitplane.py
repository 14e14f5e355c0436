"""MSB/LSB decomposition of 8-bit pixels and per-plane change rates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import GrayImage


@dataclass(frozen=True, eq=False)
class MsbLsbSplit:
    """Pixels split at plane ``n``: ``p = msb * 2**n + lsb``.

    ``msb`` holds the shifted working values ``p >> n`` (the integers the
    embedding arithmetic moves by whole steps); ``lsb`` holds ``p mod 2**n``.
    """

    n: int
    msb: np.ndarray
    lsb: np.ndarray

    @property
    def height(self) -> int:
        return self.msb.shape[0]

    @property
    def width(self) -> int:
        return self.msb.shape[1]

    @property
    def vmax(self) -> int:
        return msb_max(self.n)

    def unshifted(self) -> np.ndarray:
        """MSB contribution in pixel units (``msb << n``)."""
        return self.msb << self.n


def msb_max(n: int) -> int:
    return (1 << (8 - n)) - 1


def _check_n(n: int) -> None:
    if not 1 <= n <= 8:
        raise ValueError(f"LSB plane count n must be in [1, 8], got {n}")


def split(image: GrayImage, n: int) -> MsbLsbSplit:
    _check_n(n)
    p = image.to_array()
    return MsbLsbSplit(n, p >> n, p & ((1 << n) - 1))


def combine(s: MsbLsbSplit) -> GrayImage:
    """Inverse of :func:`split`. Raises ``OverflowError`` if any pixel leaves [0, 255]."""
    msb = np.asarray(s.msb, dtype=np.int64)
    lsb = np.asarray(s.lsb, dtype=np.int64)
    p = (msb << s.n) + lsb
    if p.size and (p.min() < 0 or p.max() > 255 or msb.min() < 0):
        bad = np.argwhere((p < 0) | (p > 255) | (msb < 0))[0]
        raise OverflowError(f"recombined pixel at {tuple(int(x) for x in bad)} is outside [0, 255]")
    return GrayImage(p)


def extract_plane(image: GrayImage, k: int) -> np.ndarray:
    """Bit plane ``k`` (1 = least significant) as a 0/1 uint8 matrix."""
    if not 1 <= k <= 8:
        raise ValueError(f"plane index k must be in [1, 8], got {k}")
    return (image.pixels >> (k - 1)) & 1


def _check_same_shape(a: GrayImage, b: GrayImage) -> None:
    if a.shape != b.shape:
        raise ValueError(f"image dimensions differ: {a.shape} vs {b.shape}")


def nbcr(a: GrayImage, b: GrayImage, k: int) -> float:
    """Percentage of plane-``k`` bits that differ between ``a`` and ``b``."""
    _check_same_shape(a, b)
    diff = extract_plane(a, k) ^ extract_plane(b, k)
    return 100.0 * int(diff.sum()) / diff.size


def nbcr_all_planes(a: GrayImage, b: GrayImage) -> np.ndarray:
    """NBCR for planes 1..8 at once (index 0 is plane 1)."""
    _check_same_shape(a, b)
    x = a.pixels ^ b.pixels
    counts = np.unpackbits(x[..., None], axis=-1, bitorder="little").reshape(-1, 8).sum(axis=0)
    return 100.0 * counts / x.size


def check_msb_value(value: int, vmax: int | None = None) -> int:
    """Return ``value`` unchanged, or raise ``OverflowError`` if it leaves [0, vmax]."""
    if value < 0:
        raise OverflowError(f"MSB value underflow: {value}")
    if vmax is not None and value > vmax:
        raise OverflowError(f"MSB value {value} exceeds maximum {vmax}")
    return value
