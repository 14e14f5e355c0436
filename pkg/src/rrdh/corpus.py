"""Grayscale image container, binary PGM I/O and the synthetic test corpus.

All randomness comes from numpy's PCG64 bit generator consumed through
``random_raw``: the raw 64-bit stream of a seeded PCG64 is frozen by numpy's
stability policy, so golden vectors derived from it stay valid across
releases (the higher-level ``Generator`` methods carry no such promise).
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import PgmFormatError, UnsupportedFormatError

SYNTH_KINDS = ("smooth-gradient", "texture", "checker")
CHECKER_LEVELS = (64, 192)


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Immutable 8-bit grayscale raster.

    ``pixels`` is a read-only ``(height, width)`` uint8 array in row-major order.
    """

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("pixel intensities must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"

    def to_array(self, dtype=np.int64) -> np.ndarray:
        """Writable copy of the pixels, widened for arithmetic."""
        return self.pixels.astype(dtype)


# BitStream: a 1-D uint8 numpy array holding 0/1 values.
def as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8).reshape(-1)
    if arr.size and arr.max() > 1:
        raise ValueError("bit stream may only contain 0 and 1")
    return arr


# --------------------------------------------------------------------------
# PGM

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens = []
    pos = 0
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise PgmFormatError("truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens, pos


def load_pgm(path) -> GrayImage:
    """Read a binary (P5) PGM with maxval 255. Header comments are skipped."""
    data = Path(path).read_bytes()
    if data[:2] in (b"P1", b"P2", b"P3", b"P4", b"P6", b"P7"):
        raise UnsupportedFormatError(f"{path}: only binary PGM (P5) is supported, got {data[:2].decode()}")
    if data[:2] != b"P5":
        raise PgmFormatError(f"{path}: not a PGM file")
    tokens, pos = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise PgmFormatError(f"{path}: non-numeric header field") from None
    if width <= 0 or height <= 0:
        raise PgmFormatError(f"{path}: bad dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedFormatError(f"{path}: maxval {maxval} unsupported (need 255)")
    # exactly one whitespace byte separates maxval from the raster
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise PgmFormatError(f"{path}: missing separator before pixel data")
    raster = data[pos + 1 : pos + 1 + width * height]
    if len(raster) != width * height:
        raise PgmFormatError(f"{path}: expected {width * height} pixel bytes, found {len(raster)}")
    return GrayImage(np.frombuffer(raster, dtype=np.uint8).reshape(height, width))


def save_pgm(image: GrayImage, path) -> None:
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(image.pixels.tobytes())


def load_corpus_dir(directory) -> dict[str, GrayImage]:
    """Every ``*.pgm`` in ``directory``, keyed by file stem, in sorted order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {directory}")
    return {p.stem: load_pgm(p) for p in sorted(directory.glob("*.pgm"))}


# --------------------------------------------------------------------------
# Deterministic generators


def _raw_words(seed: int, count: int) -> np.ndarray:
    return np.random.PCG64(seed).random_raw(count).astype("<u8")


def _uniform(seed: int, shape) -> np.ndarray:
    count = int(np.prod(shape))
    return ((_raw_words(seed, count) >> np.uint64(11)).astype(np.float64) * 2.0**-53).reshape(shape)


def gen_secret(seed: int, length: int) -> np.ndarray:
    """Pseudorandom bits: successive PCG64 words, least significant bit first."""
    if length < 0:
        raise ValueError("length must be non-negative")
    words = _raw_words(seed, (length + 63) // 64)
    return np.unpackbits(words.view(np.uint8), bitorder="little")[:length].copy()


def _box_blur(a: np.ndarray, radius: int) -> np.ndarray:
    k = 2 * radius + 1
    padded = np.pad(a, radius, mode="reflect")
    c = np.cumsum(np.cumsum(np.pad(padded, ((1, 0), (1, 0))), axis=0), axis=1)
    return (c[k:, k:] - c[:-k, k:] - c[k:, :-k] + c[:-k, :-k]) / (k * k)


def _bounded_walk(targets: np.ndarray, noise: np.ndarray, max_step: int) -> np.ndarray:
    out = np.empty(len(targets), dtype=np.int64)
    cur = int(round(targets[0]))
    for idx, (t, e) in enumerate(zip(targets, noise)):
        if idx:
            step = int(round(t - cur)) + int(e)
            cur += max(-max_step, min(max_step, step))
        out[idx] = cur
    return out


def synth_image(kind: str, size: int, seed: int) -> GrayImage:
    """Square synthetic test image.

    * ``smooth-gradient``: a noisy ramp; horizontally adjacent pixels never
      differ by more than 2.
    * ``texture``: blurred plus fine seeded noise spread over [24, 232].
    * ``checker``: pixel-level checkerboard, 64 where i+j is even, 192 otherwise.
    """
    if size < 16:
        raise ValueError("size must be at least 16")
    if kind == "checker":
        i, j = np.indices((size, size))
        lo, hi = CHECKER_LEVELS
        return GrayImage(np.where((i + j) % 2 == 0, lo, hi))
    if kind == "smooth-gradient":
        noise = (_raw_words(seed, size * (size + 1)) % np.uint64(3)).astype(np.int64) - 1
        noise = noise.reshape(size + 1, size)
        ramp = 48.0 + 160.0 * np.arange(size) / (size - 1)
        offsets = _bounded_walk(np.zeros(size), noise[size], 2)
        rows = [_bounded_walk(ramp + off, noise[i], 2) for i, off in enumerate(offsets)]
        return GrayImage(np.clip(np.array(rows), 0, 255))
    if kind == "texture":
        coarse = _box_blur(_uniform(seed, (size, size)), 3)
        coarse = (coarse - coarse.mean()) / (coarse.std() + 1e-12)
        fine = _uniform(seed + 0x9E3779B9, (size, size)) - 0.5
        field = 0.7 * coarse + 1.4 * fine
        lo, hi = field.min(), field.max()
        return GrayImage(np.round(24 + (field - lo) * (208 / (hi - lo))))
    raise ValueError(f"unknown kind {kind!r}; expected one of {SYNTH_KINDS}")


def bundled_corpus(size: int = 128) -> dict[str, GrayImage]:
    """The stand-in for the standard test images: textures, gradients, checker."""
    images = {}
    for s in range(1, 5):
        images[f"texture-{s}"] = synth_image("texture", size, s)
    for s in range(1, 4):
        images[f"gradient-{s}"] = synth_image("smooth-gradient", size, s)
    images["checker"] = synth_image("checker", size, 0)
    return images


def resolve_corpus(source: str | None, size: int = 128) -> dict[str, GrayImage]:
    """``synth`` → bundled corpus; ``dir`` → ``$RRDH_CORPUS_DIR``; anything else is a path."""
    if source is None:
        source = os.environ.get("RRDH_CORPUS_DIR") or "synth"
    if source == "synth":
        return bundled_corpus(size)
    if source == "dir":
        env = os.environ.get("RRDH_CORPUS_DIR")
        if not env:
            raise FileNotFoundError("RRDH_CORPUS_DIR is not set")
        source = env
    return load_corpus_dir(source)
