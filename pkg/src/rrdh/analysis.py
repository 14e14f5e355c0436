"""Experiments: bit-plane change rates, block distortion maps, ordering drift
under compression, and bit-error-rate benchmarks of the embedding scheme.

Every report can be written as CSV (fixed column order) or as JSON records
with the same field names.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Mapping

import numpy as np

from .bitplane import nbcr_all_planes
from .corpus import GrayImage, as_bits, gen_secret
from .errors import CapacityError
from .hardening import majority_aux
from .jpeg_sim import compress_roundtrip
from .rdh.auxinfo import AUX_BITS, AuxInfo
from .rdh.auxinfo import read_aux_bits
from .rdh.cells import complexity_key, neighbor_matrix
from .rdh.scheme import EmbedConfig, embed, extract_partial

NBCR_FIELDS = ("image", "qf", "plane", "nbcr_pct")
DRIFT_FIELDS = ("label", "mu_orig", "mu_qf", "qf", "rank_orig", "rank_qf")
BENCH_FIELDS = ("image", "n", "N", "ordering", "r", "T", "qf", "ber", "aux_intact", "status")

DEFAULT_QFS = (70, 75, 80, 85, 90, 95, 100)


def _as_named(images) -> list[tuple[str, GrayImage]]:
    if isinstance(images, Mapping):
        return list(images.items())
    if isinstance(images, GrayImage):
        return [("image", images)]
    return [(str(k), img) for k, img in images]


def write_records(records: list[dict], fields, fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps([{k: r[k] for k in fields} for r in records], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    writer.writerows(records)
    return buf.getvalue()


# --------------------------------------------------------------------------
# NBCR


@dataclass
class NbcrReport:
    rows: list[dict]

    def average(self, plane: int, qf: int) -> float:
        vals = [r["nbcr_pct"] for r in self.rows if r["plane"] == plane and r["qf"] == qf]
        return float(np.mean(vals))

    @property
    def averages(self) -> dict[tuple[int, int], float]:
        keys = sorted({(r["plane"], r["qf"]) for r in self.rows})
        return {k: self.average(*k) for k in keys}

    def to_csv(self) -> str:
        return write_records(self.rows, NBCR_FIELDS)

    def to_json(self) -> str:
        return write_records(self.rows, NBCR_FIELDS, "json")


def nbcr_report(images, qfs: Iterable[int]) -> NbcrReport:
    named = _as_named(images)
    if not named:
        raise ValueError("empty corpus")
    rows = []
    for name, img in named:
        for qf in qfs:
            rates = nbcr_all_planes(img, compress_roundtrip(img, qf))
            rows.extend({"image": name, "qf": qf, "plane": k, "nbcr_pct": round(float(rates[k - 1]), 4)}
                        for k in range(1, 9))
    return NbcrReport(rows)


# --------------------------------------------------------------------------
# block maps and ordering drift


def _block(a: np.ndarray, origin, size: int = 8) -> np.ndarray:
    i, j = origin
    h, w = a.shape
    if not (0 <= i and 0 <= j and i + size <= h and j + size <= w):
        raise ValueError(f"{size}x{size} block at {origin} does not fit a {h}x{w} image")
    return a[i : i + size, j : j + size]


def block_diff_map(image: GrayImage, qf: int, block_origin) -> np.ndarray:
    """|original - compressed| over one 8x8 block."""
    before = _block(image.to_array(), block_origin)
    after = _block(compress_roundtrip(image, qf).to_array(), block_origin)
    return np.abs(before - after)


def kendall_distance(a, b) -> int:
    """Number of item pairs that the two orderings rank differently."""
    if sorted(a) != sorted(b):
        raise ValueError("orderings are not permutations of the same items")
    rank = {x: k for k, x in enumerate(b)}
    return sum(1 for x, y in combinations(a, 2) if rank[x] > rank[y])


def _block_grey(size: int = 8) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, size - 1) for j in range(1, size - 1) if (i + j) % 2 == 0]


@dataclass
class DriftReport:
    block_origin: tuple[int, int]
    n: int
    labels: list[str]
    mu_orig: list[float]
    mu_by_qf: dict[int, list[float]]
    order_orig: list[str]
    orders: dict[int, list[str]]
    in_place: dict[int, int] = field(default_factory=dict)
    kendall: dict[int, int] = field(default_factory=dict)

    def records(self) -> list[dict]:
        rank_orig = {lab: k + 1 for k, lab in enumerate(self.order_orig)}
        out = []
        for qf, mus in self.mu_by_qf.items():
            rank_qf = {lab: k + 1 for k, lab in enumerate(self.orders[qf])}
            for lab, mo, mq in zip(self.labels, self.mu_orig, mus):
                out.append({"label": lab, "mu_orig": mo, "mu_qf": mq, "qf": qf,
                            "rank_orig": rank_orig[lab], "rank_qf": rank_qf[lab]})
        return out

    def to_csv(self) -> str:
        return write_records(self.records(), DRIFT_FIELDS)

    def to_json(self) -> str:
        return write_records(self.records(), DRIFT_FIELDS, "json")


def complexity_order(labels, mu) -> list[str]:
    """Labels by ascending complexity; equal values keep their input order."""
    if len(labels) != len(mu):
        raise ValueError("one complexity value per label required")
    return [labels[k] for k in np.argsort(np.asarray(mu, dtype=np.float64), kind="stable")]


def _grey_complexities(block: np.ndarray, n: int, coords) -> np.ndarray:
    return complexity_key(neighbor_matrix(block >> n, coords)) / 16


def ordering_drift(image: GrayImage, block_origin, n: int, qfs: Iterable[int]) -> DriftReport:
    """How compression reorders the grey pixels of one 8x8 block by local complexity.

    Grey pixels are the 18 block-interior positions with even (i+j) in block
    coordinates, labelled A1..A18 in raster order.
    """
    coords = _block_grey()
    labels = [f"A{k + 1}" for k in range(len(coords))]
    original = _block(image.to_array(), block_origin)
    mu0 = _grey_complexities(original, n, coords)
    # labels are in raster order, so ties break by raster position
    order0 = complexity_order(labels, mu0)
    report = DriftReport(tuple(block_origin), n, labels, mu0.tolist(), {}, order0, {})
    for qf in qfs:
        attacked = _block(compress_roundtrip(image, qf).to_array(), block_origin)
        mu = _grey_complexities(attacked, n, coords)
        order = complexity_order(labels, mu)
        report.mu_by_qf[qf] = mu.tolist()
        report.orders[qf] = order
        report.in_place[qf] = sum(a == b for a, b in zip(order0, order))
        report.kendall[qf] = kendall_distance(order0, order)
    return report


# --------------------------------------------------------------------------
# bit error rates


def ber(sent, received) -> float:
    """Bit error rate of ``received`` against ``sent``.

    Positions past the shorter stream count as errors; the rate is capped at 1.
    """
    sent = as_bits(sent)
    received = as_bits(received)
    if sent.size == 0:
        raise ValueError("bit error rate is undefined for an empty sent stream")
    m = min(sent.size, received.size)
    errors = int(np.count_nonzero(sent[:m] != received[:m])) + abs(sent.size - received.size)
    return min(1.0, errors / sent.size)


GRID_PRESETS = {
    "baseline": EmbedConfig(n=3, N=3, ordering="complexity", T=1, r=1),
    "raster": EmbedConfig(n=3, N=3, ordering="raster", T=1, r=1),
    "rep5": EmbedConfig(n=3, N=3, ordering="complexity", T=1, r=5),
    # the T=4 robust margin leaves no usable range above n=1
    "shift4": EmbedConfig(n=1, N=3, ordering="complexity", T=4, r=1),
    "hardened": EmbedConfig(n=1, N=3, ordering="raster", T=4, r=5),
}


def grid_config(name: str, n: int | None = None) -> EmbedConfig:
    try:
        cfg = GRID_PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown grid preset {name!r}; choose from {sorted(GRID_PRESETS)}") from None
    if n is not None:
        cfg = EmbedConfig(n=n, N=cfg.N, ordering=cfg.ordering, T=cfg.T, r=cfg.r)
    return cfg


@dataclass
class BerResult:
    image: str
    config: EmbedConfig
    qf: int | str | None
    ber: float | None
    aux_intact: bool | None
    status: str
    restored_exact: bool | None = None

    def record(self) -> dict:
        return {
            "image": self.image, "n": self.config.n, "N": self.config.N, "ordering": self.config.ordering,
            "r": self.config.r, "T": self.config.T, "qf": "none" if self.qf is None else self.qf,
            "ber": None if self.ber is None else round(self.ber, 6),
            "aux_intact": self.aux_intact, "status": self.status,
        }


def _decoded_aux(image: GrayImage, cfg: EmbedConfig) -> AuxInfo:
    bits = majority_aux(read_aux_bits(image, cfg.n, cfg.r), cfg.r)
    return AuxInfo.from_bits(bits[:AUX_BITS])


def bench_cell(name: str, image: GrayImage, cfg: EmbedConfig, secret, attacks) -> list[BerResult]:
    """Embed once, then score every ``(label, attack)``; ``attack=None`` means untouched."""
    try:
        rec = embed(image, secret, cfg)
    except CapacityError:
        return [BerResult(name, cfg, label, None, None, "capacity") for label, _ in attacks]
    used = rec.config
    out = []
    for label, attack in attacks:
        received = rec.marked if attack is None else attack(rec.marked)
        res = extract_partial(received, used)
        aux_ok = _decoded_aux(received, used) == rec.aux
        exact = (res.restored == image) if attack is None else None
        out.append(BerResult(name, used, label, ber(secret, res.secret), aux_ok, res.status, exact))
    return out


def jpeg_attack(qf: int) -> Callable[[GrayImage], GrayImage]:
    return lambda img: compress_roundtrip(img, qf)


def robustness_bench(corpus, grid, qfs, secret_len: int = 256, seed: int = 7) -> list[BerResult]:
    """BER for every (image, config, qf); ``qf=None`` is the no-attack row.

    ``grid`` holds preset names or :class:`EmbedConfig` objects. Failures are
    reported in ``status`` and never abort the run.
    """
    named = _as_named(corpus)
    if not named or not grid:
        raise ValueError("benchmark needs a non-empty corpus and grid")
    configs = [grid_config(g) if isinstance(g, str) else g for g in grid]
    attacks = [(qf, None if qf is None else jpeg_attack(qf)) for qf in qfs]
    secret = gen_secret(seed, secret_len)
    results = []
    for name, img in named:
        for cfg in configs:
            results.extend(bench_cell(name, img, cfg, secret, attacks))
    return results


def bench_records(results: list[BerResult]) -> list[dict]:
    return [r.record() for r in results]


def mean_ber(results: list[BerResult], qf) -> float:
    vals = [r.ber for r in results if r.qf == qf and r.ber is not None]
    return float(np.mean(vals)) if vals else math.nan
