"""Lossy core of baseline JPEG on grayscale images.

Each 8x8 block goes through level shift, orthonormal 2-D DCT, quantization
with the IJG-scaled luminance table, dequantization, inverse DCT, rounding
and clamping. Entropy coding is lossless and therefore left out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import GrayImage

BLOCK = 8

BASE_LUMINANCE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)


def _dct_matrix() -> np.ndarray:
    u = np.arange(BLOCK)[:, None]
    i = np.arange(BLOCK)[None, :]
    c = 0.5 * np.cos((2 * i + 1) * u * np.pi / 16)
    c[0, :] /= np.sqrt(2.0)
    return c


# row u, column i: 1/2 * alpha(u) * cos((2i+1) u pi / 16); orthogonal
DCT_MATRIX = _dct_matrix()


@dataclass(frozen=True, eq=False)
class QuantTable:
    qf: int
    steps: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, QuantTable):
            return NotImplemented
        return self.qf == other.qf and np.array_equal(self.steps, other.steps)


def quant_table(qf: int) -> QuantTable:
    """IJG quality scaling of the standard luminance table."""
    if not 1 <= qf <= 100:
        raise ValueError(f"quality factor must be in [1, 100], got {qf}")
    scale = 5000 // qf if qf < 50 else 200 - 2 * qf
    steps = np.clip((BASE_LUMINANCE * scale + 50) // 100, 1, 255)
    steps.setflags(write=False)
    return QuantTable(qf, steps)


def dct2_block(block) -> np.ndarray:
    b = np.asarray(block, dtype=np.float64)
    if b.shape[-2:] != (BLOCK, BLOCK):
        raise ValueError("expected 8x8 block(s)")
    return DCT_MATRIX @ b @ DCT_MATRIX.T


def idct2_block(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=np.float64)
    if c.shape[-2:] != (BLOCK, BLOCK):
        raise ValueError("expected 8x8 block(s)")
    return DCT_MATRIX.T @ c @ DCT_MATRIX


def round_half_away(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def quantize(coeffs, table: QuantTable) -> np.ndarray:
    return round_half_away(np.asarray(coeffs, dtype=np.float64) / table.steps).astype(np.int64)


def dequantize(r, table: QuantTable) -> np.ndarray:
    return (np.asarray(r, dtype=np.int64) * table.steps).astype(np.float64)


def _to_blocks(a: np.ndarray) -> np.ndarray:
    h, w = a.shape
    return a.reshape(h // BLOCK, BLOCK, w // BLOCK, BLOCK).swapaxes(1, 2)


def _from_blocks(b: np.ndarray) -> np.ndarray:
    bh, bw = b.shape[:2]
    return b.swapaxes(1, 2).reshape(bh * BLOCK, bw * BLOCK)


def compress_roundtrip(image: GrayImage, qf: int) -> GrayImage:
    """Decode(encode(image)) at quality ``qf``.

    Dimensions that are not multiples of 8 are padded by edge replication
    and cropped back afterwards.
    """
    table = quant_table(qf)
    h, w = image.shape
    ph, pw = -h % BLOCK, -w % BLOCK
    a = image.to_array(np.float64)
    if ph or pw:
        a = np.pad(a, ((0, ph), (0, pw)), mode="edge")
    blocks = _to_blocks(a - 128.0)
    rec = idct2_block(dequantize(quantize(dct2_block(blocks), table), table))
    out = np.floor(_from_blocks(rec) + 128.0 + 0.5)
    return GrayImage(np.clip(out, 0, 255)[:h, :w])
