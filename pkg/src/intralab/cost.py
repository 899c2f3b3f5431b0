"""Matching-cost kernels: SAD and Hadamard SATD.

SATD tiles the difference into Hadamard blocks: 8x8 tiles when both
dimensions are multiples of 8, otherwise 4x4 tiles over the largest
multiple-of-4 area, with any right/bottom remainder strips costed by
SAD.  Regions narrower than 4 in either dimension fall back to SAD
entirely.  Per-tile sums of absolute transform coefficients use the
conventional normalization: (s + 1) >> 1 for 4x4, (s + 2) >> 2 for 8x8.

All kernels accept integer sample arrays of identical shape and return
Python ints.  satd(a, b) == satd(b, a) and adding a constant to both
inputs leaves every cost unchanged.
"""

from __future__ import annotations

import numpy as np

METRICS = ("satd", "sad")


def _hadamard(n: int) -> np.ndarray:
    h = np.array([[1]], dtype=np.int64)
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    return h


_H4 = _hadamard(4)
_H8 = _hadamard(8)


def _check_pair(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.ndim != 2:
        raise ValueError(f"expected 2-D sample arrays, got {a.ndim}-D")
    return a, b


def sad(a: np.ndarray, b: np.ndarray) -> int:
    """Sum of absolute differences."""
    a, b = _check_pair(a, b)
    if a.size == 0:
        return 0
    return int(np.abs(a.astype(np.int64) - b.astype(np.int64)).sum())


def _tile_satd(diffs: np.ndarray, tile: int) -> np.ndarray:
    """Hadamard cost of (N, th, tw) diffs fully tiled by tile x tile."""
    n, th, tw = diffs.shape
    hmat = _H4 if tile == 4 else _H8
    t = diffs.reshape(n, th // tile, tile, tw // tile, tile)
    t = t.transpose(0, 1, 3, 2, 4).reshape(-1, tile, tile)
    coeffs = (hmat @ t) @ hmat.T
    sums = np.abs(coeffs).sum(axis=(1, 2))
    if tile == 4:
        per_tile = (sums + 1) >> 1
    else:
        per_tile = (sums + 2) >> 2
    return per_tile.reshape(n, -1).sum(axis=1)


def satd_batch(diffs: np.ndarray) -> np.ndarray:
    """SATD of a batch of (N, h, w) difference arrays (int64 result)."""
    diffs = np.asarray(diffs, dtype=np.int64)
    n, h, w = diffs.shape
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    if h < 4 or w < 4:
        return np.abs(diffs).sum(axis=(1, 2))
    tile = 8 if (h % 8 == 0 and w % 8 == 0) else 4
    th = (h // tile) * tile
    tw = (w // tile) * tile
    total = _tile_satd(diffs[:, :th, :tw], tile)
    if th < h:
        total = total + np.abs(diffs[:, th:, :]).sum(axis=(1, 2))
    if tw < w:
        total = total + np.abs(diffs[:, :th, tw:]).sum(axis=(1, 2))
    return total


def satd(a: np.ndarray, b: np.ndarray) -> int:
    """Hadamard transformed-difference cost of one array pair."""
    a, b = _check_pair(a, b)
    if a.size == 0:
        return 0
    d = a.astype(np.int64) - b.astype(np.int64)
    return int(satd_batch(d[None])[0])


def block_cost(a: np.ndarray, b: np.ndarray, metric: str) -> int:
    """Dispatch on the configured template-loss metric."""
    if metric == "sad":
        return sad(a, b)
    if metric == "satd":
        return satd(a, b)
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
