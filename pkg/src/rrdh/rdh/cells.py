"""Chessboard cell partition, cross-neighbourhood statistics and predictors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# (di, dj) of the four cross neighbours: left, up, right, down
CROSS = ((0, -1), (-1, 0), (0, 1), (1, 0))


@dataclass(frozen=True)
class CellMap:
    """Grey ((i+j) even) and white ((i+j) odd) interior pixels plus the one-pixel border.

    All three lists are in raster order.
    """

    height: int
    width: int
    grey: tuple[tuple[int, int], ...]
    white: tuple[tuple[int, int], ...]
    border: tuple[tuple[int, int], ...]

    @property
    def interior(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.grey + self.white))


def classify_cells(h: int, w: int) -> CellMap:
    if h < 3 or w < 3:
        raise ValueError(f"image too small for the chessboard partition: {h}x{w}")
    grey, white, border = [], [], []
    for i in range(h):
        for j in range(w):
            if i in (0, h - 1) or j in (0, w - 1):
                border.append((i, j))
            elif (i + j) % 2 == 0:
                grey.append((i, j))
            else:
                white.append((i, j))
    return CellMap(h, w, tuple(grey), tuple(white), tuple(border))


def is_grey(coord) -> bool:
    return (coord[0] + coord[1]) % 2 == 0


@dataclass(frozen=True)
class Neighborhood:
    """The four cross neighbours sorted ascending, with their mean."""

    values: tuple[int, int, int, int]

    @property
    def mean(self) -> float:
        return sum(self.values) / 4


def neighborhood(msb, i: int, j: int) -> Neighborhood:
    h, w = np.shape(msb)
    if not (0 < i < h - 1 and 0 < j < w - 1):
        raise ValueError(f"({i}, {j}) is a border coordinate")
    return Neighborhood(tuple(sorted(int(msb[i + di][j + dj]) for di, dj in CROSS)))


def neighbor_matrix(msb: np.ndarray, coords) -> np.ndarray:
    """Sorted cross neighbours for every coordinate, shape ``(len(coords), 4)``."""
    c = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
    i, j = c[:, 0], c[:, 1]
    nb = np.stack([msb[i + di, j + dj] for di, dj in CROSS], axis=1).astype(np.int64)
    nb.sort(axis=1)
    return nb


def complexity_key(nb: np.ndarray) -> np.ndarray:
    """16x the neighbourhood variance, exact in integers: 4*sum(v^2) - (sum v)^2."""
    nb = np.asarray(nb, dtype=np.int64)
    return 4 * (nb * nb).sum(axis=-1) - nb.sum(axis=-1) ** 2


def local_complexity(msb, i: int, j: int) -> float:
    """Variance of the four cross neighbours of ``(i, j)`` about their mean."""
    nb = np.array(neighborhood(msb, i, j).values)
    return int(complexity_key(nb)) / 16


def sort_by_complexity(coords, msb) -> list[tuple[int, int]]:
    """Ascending local complexity; equal complexities keep raster order."""
    coords = [tuple(int(x) for x in c) for c in coords]
    if not coords:
        return []
    keys = complexity_key(neighbor_matrix(np.asarray(msb), coords))
    w = np.shape(msb)[1]
    raster = np.array([i * w + j for i, j in coords])
    return [coords[k] for k in np.lexsort((raster, keys))]


@dataclass(frozen=True)
class PredictorPair:
    N: int
    p1: int
    p2: int


def _check_predictor(N: int) -> None:
    if N not in (1, 2, 3):
        raise ValueError(f"predictor number N must be 1, 2 or 3, got {N}")


def predictor_pair(nb: Neighborhood, N: int) -> PredictorPair:
    """Floor-mean of the N smallest (layer 1) and N largest (layer 2) neighbours."""
    _check_predictor(N)
    v = nb.values
    return PredictorPair(N, sum(v[:N]) // N, sum(v[4 - N :]) // N)


def predictions(nb: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`predictor_pair` over a sorted neighbour matrix."""
    _check_predictor(N)
    return nb[:, :N].sum(axis=1) // N, nb[:, 4 - N :].sum(axis=1) // N
