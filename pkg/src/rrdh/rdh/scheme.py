"""End-to-end two-layer embedding in the MSB planes and its exact inverse.

Embedding pipeline: split at plane n, pull interior values away from the
range ends (location map), build the payload, run the grey pass then the
white pass (each sorted by local complexity or in raster order, two layers
per pixel), recombine with the LSB planes, and finally substitute the
auxiliary information into plane n+1 of the border.

Payload bit layout::

    [u32 map byte count][map bytes][u32 saved-bit count][saved bits][secret]

``saved bits`` are the plane-(n+1) border bits overwritten by the aux
information, followed by the preprocessing offsets (empty for T = 1).

Interior pixels whose cross neighbourhood touches an aux-carrying border
pixel are never embedded into: their predictions would otherwise depend on
bits that only the payload can restore.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache, partial

import numpy as np

from ..bitplane import MsbLsbSplit, combine, msb_max, split
from ..corpus import GrayImage, as_bits
from ..errors import CapacityError, CorruptAuxError, IntegrityError, MapDecodeError
from ..hardening import (
    HardeningConfig,
    margin,
    shifted_embed_layer1,
    shifted_embed_layer2,
    shifted_extract_layer1,
    shifted_extract_layer2,
)
from .auxinfo import AUX_BITS, AuxInfo, aux_positions, read_aux, write_aux
from .cells import CROSS, CellMap, classify_cells, complexity_key, is_grey, neighbor_matrix, predictions
from .layers import embed_layer1, embed_layer2, extract_layer1, extract_layer2
from .locmap import LocationMap, decompress_map, offset_width, preprocess, undo_preprocess

HEADER_BITS = 32


@dataclass(frozen=True)
class EmbedConfig:
    n: int = 3
    N: int | str = "auto"
    ordering: str = "complexity"
    T: int = 1
    r: int = 1

    def __post_init__(self):
        if not 1 <= self.n <= 7:
            raise ValueError(f"n must be in [1, 7] for embedding, got {self.n}")
        if self.N not in (1, 2, 3, "auto"):
            raise ValueError(f"N must be 1, 2, 3 or 'auto', got {self.N!r}")
        self.hardening  # validates r, ordering, T

    @property
    def hardening(self) -> HardeningConfig:
        return HardeningConfig(self.r, self.ordering, self.T)


@dataclass
class EmbedRecord:
    marked: GrayImage
    aux: AuxInfo
    n: int
    capacity_used: int
    payload_layout: dict[str, tuple[int, int]]
    config: EmbedConfig
    psnr: float = math.inf

    def metadata(self) -> dict:
        """JSON-ready description (everything except the image itself)."""
        return {
            "n": self.n,
            "N": self.aux.N,
            "ordering": self.config.ordering,
            "T": self.config.T,
            "r": self.config.r,
            "payload_len": self.aux.payload_len,
            "c_end": list(self.aux.c_end),
            "capacity_used": self.capacity_used,
            "secret_len": self.payload_layout["secret"][1],
            "payload_layout": {k: list(v) for k, v in self.payload_layout.items()},
            "psnr": None if math.isinf(self.psnr) else round(self.psnr, 6),
        }


@dataclass
class ExtractResult:
    """Outcome of an extraction attempt; ``status`` is ``"ok"`` on success.

    Other statuses: ``corrupt_aux``, ``short_payload``, ``map_error``,
    ``overflow``. ``secret`` is a best-effort recovery in those cases (possibly
    empty) and ``restored`` is None.
    """

    status: str
    secret: np.ndarray
    restored: GrayImage | None = None
    aux: AuxInfo | None = None
    payload: np.ndarray | None = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def psnr(a: GrayImage, b: GrayImage) -> float:
    mse = float(np.mean((a.to_array() - b.to_array()) ** 2))
    return math.inf if mse == 0 else 10 * math.log10(255.0**2 / mse)


# --------------------------------------------------------------------------
# geometry


@dataclass(frozen=True)
class _Layout:
    cells: CellMap
    aux_pos: tuple[tuple[int, int], ...]
    mask: np.ndarray = field(repr=False)
    grey: tuple[tuple[int, int], ...]
    white: tuple[tuple[int, int], ...]


@lru_cache(maxsize=32)
def _layout(h: int, w: int, r: int) -> _Layout:
    cells = classify_cells(h, w)
    aux_pos = tuple(aux_positions(h, w, r))
    carrying = np.zeros((h, w), dtype=bool)
    carrying[tuple(np.array(aux_pos).T)] = True
    mask = np.zeros((h, w), dtype=bool)
    mask[1:-1, 1:-1] = True
    for di, dj in CROSS:
        mask[1:-1, 1:-1] &= ~carrying[1 + di : h - 1 + di, 1 + dj : w - 1 + dj]
    mask.setflags(write=False)
    grey = tuple(c for c in cells.grey if mask[c])
    white = tuple(c for c in cells.white if mask[c])
    return _Layout(cells, aux_pos, mask, grey, white)


def embeddable_mask(h: int, w: int, r: int = 1) -> np.ndarray:
    """Interior pixels the scheme may modify for an ``h x w`` image."""
    return _layout(h, w, r).mask


def plan_pass(coords, msb: np.ndarray, ordering: str, N: int):
    """Visiting order and the (p1, p2) predictions for one pass.

    Returns ``(coords, p1, p2)`` as parallel lists; feed it to
    :func:`embed_pass` / :func:`extract_pass`.
    """
    if not coords:
        return [], [], []
    nb = neighbor_matrix(msb, coords)
    if ordering == "complexity":
        # coords arrive in raster order, so a stable sort keeps raster tie-breaks
        order = np.argsort(complexity_key(nb), kind="stable")
    else:
        order = np.arange(len(coords))
    p1, p2 = predictions(nb[order], N)
    return [coords[k] for k in order.tolist()], p1.tolist(), p2.tolist()


def pass_order(msb: np.ndarray, coords, ordering: str) -> list[tuple[int, int]]:
    return plan_pass(list(coords), np.asarray(msb), ordering, 3)[0]


def _kernels(T: int):
    if T == 1:
        return embed_layer1, embed_layer2, extract_layer1, extract_layer2
    return (
        partial(shifted_embed_layer1, T=T),
        partial(shifted_embed_layer2, T=T),
        partial(shifted_extract_layer1, T=T),
        partial(shifted_extract_layer2, T=T),
    )


def embed_pass(v: list, plan, bits: list, pos: int, T: int, vmax: int | None = None):
    """Embed ``bits[pos:]`` along ``plan``; mutates ``v``. Returns (new pos, last pixel)."""
    emb1, emb2, _, _ = _kernels(T)
    total = len(bits)
    last = None
    for (i, j), a, b in zip(*plan):
        if pos >= total:
            break
        x, used = emb1(v[i][j], a, bits[pos] if pos < total else None, vmax=vmax)
        pos += used
        x, used = emb2(x, b, bits[pos] if pos < total else None, vmax=vmax)
        pos += used
        v[i][j] = x
        last = (i, j)
    return pos, last


def extract_pass(v: list, plan, T: int, stop=None):
    """Invert :func:`embed_pass` up to and including ``stop`` (all pixels if None)."""
    _, _, ext1, ext2 = _kernels(T)
    bits = []
    for (i, j), a, b in zip(*plan):
        x, b2 = ext2(v[i][j], b)
        x, b1 = ext1(x, a)
        v[i][j] = x
        if b1 is not None:
            bits.append(b1)
        if b2 is not None:
            bits.append(b2)
        if (i, j) == stop:
            return bits, True
    return bits, stop is None


# --------------------------------------------------------------------------
# payload


def _u32_bits(x: int) -> list[int]:
    return [(x >> s) & 1 for s in range(HEADER_BITS - 1, -1, -1)]


def _bits_u32(bits) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | int(b)
    return v


def build_payload(map_bytes: bytes, saved, secret) -> tuple[list[int], dict[str, tuple[int, int]]]:
    map_bits = np.unpackbits(np.frombuffer(map_bytes, dtype=np.uint8)).tolist()
    saved = as_bits(saved).tolist()
    secret = as_bits(secret).tolist()
    payload = _u32_bits(len(map_bytes)) + map_bits + _u32_bits(len(saved)) + saved + secret
    map_at = HEADER_BITS
    saved_at = map_at + len(map_bits) + HEADER_BITS
    secret_at = saved_at + len(saved)
    layout = {"map": (map_at, len(map_bits)), "saved": (saved_at, len(saved)), "secret": (secret_at, len(secret))}
    return payload, layout


def parse_payload(payload) -> tuple[bytes, np.ndarray, np.ndarray]:
    bits = as_bits(payload)
    if bits.size < HEADER_BITS:
        raise MapDecodeError("payload shorter than the map header")
    map_len = _bits_u32(bits[:HEADER_BITS])
    map_end = HEADER_BITS + 8 * map_len
    if map_end + HEADER_BITS > bits.size:
        raise MapDecodeError(f"map length {map_len} bytes overruns the payload")
    saved_len = _bits_u32(bits[map_end : map_end + HEADER_BITS])
    saved_end = map_end + HEADER_BITS + saved_len
    if saved_end > bits.size:
        raise MapDecodeError(f"saved-bit length {saved_len} overruns the payload")
    map_bytes = np.packbits(bits[HEADER_BITS:map_end]).tobytes()
    return map_bytes, bits[map_end + HEADER_BITS : saved_end], bits[saved_end:]


# --------------------------------------------------------------------------
# embed


def _check_range(cfg: EmbedConfig) -> int:
    vmax = msb_max(cfg.n)
    need = 2 * margin(cfg.T) + 1
    if vmax < need:
        raise CapacityError(
            f"n={cfg.n} leaves MSB values in [0, {vmax}]; shift T={cfg.T} needs a range of at least {need + 1}", 0
        )
    return vmax


def _embed_with(image: GrayImage, secret: np.ndarray, cfg: EmbedConfig, N: int) -> EmbedRecord:
    h, w = image.shape
    lay = _layout(h, w, cfg.r)
    vmax = _check_range(cfg)
    m = margin(cfg.T)
    s = split(image, cfg.n)
    msb, locmap = preprocess(s.msb, lay.cells, vmax, m, lay.mask)
    rows, cols = np.array(lay.aux_pos).T
    saved = np.concatenate([(s.msb[rows, cols] & 1).astype(np.uint8), locmap.offset_bits()])
    payload, layout = build_payload(locmap.compressed, saved, secret)
    overhead = len(payload) - len(secret)

    v = msb.tolist()
    pos, last = embed_pass(v, plan_pass(lay.grey, msb, cfg.ordering, N), payload, 0, cfg.T, vmax)
    if pos < len(payload):
        pos, last_white = embed_pass(v, plan_pass(lay.white, np.array(v), cfg.ordering, N), payload, pos, cfg.T, vmax)
        last = last_white or last
    if pos < len(payload):
        achievable = max(0, pos - overhead)
        raise CapacityError(
            f"payload of {len(payload)} bits ({len(secret)} secret) exceeds capacity; "
            f"about {achievable} secret bits fit with N={N}",
            achievable,
        )
    marked = combine(MsbLsbSplit(cfg.n, np.array(v, dtype=np.int64), s.lsb))
    aux = AuxInfo(N, len(payload), last)
    marked, _ = write_aux(marked, aux, cfg.n, cfg.r)
    return EmbedRecord(marked, aux, cfg.n, len(payload), layout, replace(cfg, N=N), psnr(image, marked))


def embed(image: GrayImage, secret, cfg: EmbedConfig = EmbedConfig()) -> EmbedRecord:
    """Hide ``secret`` in ``image``.

    With ``cfg.N == "auto"`` every predictor is tried and the one giving the
    highest PSNR wins (ties go to the smaller N).
    """
    secret = as_bits(secret)
    if cfg.N != "auto":
        return _embed_with(image, secret, cfg, cfg.N)
    best, errors = None, []
    for N in (1, 2, 3):
        try:
            rec = _embed_with(image, secret, cfg, N)
        except CapacityError as exc:
            errors.append(exc)
            continue
        if best is None or rec.psnr > best.psnr:
            best = rec
    if best is None:
        achievable = max(e.achievable for e in errors)
        raise CapacityError(
            f"{secret.size} secret bits exceed capacity for every predictor; about {achievable} fit", achievable
        )
    return best


# --------------------------------------------------------------------------
# extract


def _best_effort_secret(payload) -> np.ndarray:
    try:
        return parse_payload(payload)[2]
    except MapDecodeError:
        return np.zeros(0, dtype=np.uint8)


def extract_partial(marked: GrayImage, cfg: EmbedConfig = EmbedConfig()) -> ExtractResult:
    """Extraction that reports damage through ``status`` instead of raising."""
    h, w = marked.shape
    lay = _layout(h, w, cfg.r)
    vmax = _check_range(cfg)
    empty = np.zeros(0, dtype=np.uint8)
    try:
        aux = read_aux(marked, cfg.n, cfg.r)
    except CorruptAuxError as exc:
        return ExtractResult("corrupt_aux", empty, detail=str(exc))
    if not lay.mask[aux.c_end]:
        return ExtractResult("corrupt_aux", empty, aux=aux, detail=f"C_end {aux.c_end} is not an embeddable pixel")

    s = split(marked, cfg.n)
    v = s.msb.tolist()
    if is_grey(aux.c_end):
        white_bits = []
        grey_bits, _ = extract_pass(v, plan_pass(lay.grey, s.msb, cfg.ordering, aux.N), cfg.T, stop=aux.c_end)
    else:
        white_bits, _ = extract_pass(v, plan_pass(lay.white, s.msb, cfg.ordering, aux.N), cfg.T, stop=aux.c_end)
        grey_bits, _ = extract_pass(v, plan_pass(lay.grey, np.array(v), cfg.ordering, aux.N), cfg.T)
    payload = np.array(grey_bits + white_bits, dtype=np.uint8)
    if payload.size < aux.payload_len:
        return ExtractResult(
            "short_payload", _best_effort_secret(payload), aux=aux, payload=payload,
            detail=f"recovered {payload.size} of {aux.payload_len} payload bits",
        )
    payload = payload[: aux.payload_len]

    try:
        map_bytes, saved, secret = parse_payload(payload)
        flags = decompress_map(map_bytes)
        interior = lay.cells.interior
        if flags.size != len(interior):
            raise MapDecodeError(f"map holds {flags.size} flags, expected {len(interior)}")
        m = margin(cfg.T)
        n_flagged = int(flags.sum())
        n_border = AUX_BITS * cfg.r
        if saved.size != n_border + n_flagged * offset_width(m):
            raise MapDecodeError(f"saved-bit segment has {saved.size} bits, expected {n_border + n_flagged * offset_width(m)}")
        locmap = LocationMap(flags, m, LocationMap.decode_offsets(saved[n_border:], n_flagged, m))
        msb = undo_preprocess(np.array(v, dtype=np.int64), lay.cells, vmax, locmap)
    except MapDecodeError as exc:
        return ExtractResult("map_error", _best_effort_secret(payload), aux=aux, payload=payload, detail=str(exc))

    rows, cols = np.array(lay.aux_pos).T
    msb[rows, cols] = (msb[rows, cols] & ~1) | saved[:n_border].astype(np.int64)
    try:
        restored = combine(MsbLsbSplit(cfg.n, msb, s.lsb))
    except OverflowError as exc:
        return ExtractResult("overflow", secret, aux=aux, payload=payload, detail=str(exc))
    return ExtractResult("ok", secret, restored, aux, payload)


def extract(marked: GrayImage, cfg: EmbedConfig = EmbedConfig()) -> tuple[np.ndarray, GrayImage]:
    """Recover ``(secret, original image)``.

    Raises :class:`CorruptAuxError` or :class:`IntegrityError` (with the
    partial :class:`ExtractResult` attached) when the marked image was damaged.
    """
    res = extract_partial(marked, cfg)
    if res.status == "corrupt_aux":
        raise CorruptAuxError(res.detail, partial=res)
    if not res.ok:
        raise IntegrityError(f"{res.status}: {res.detail}", partial=res)
    return res.secret, res.restored
