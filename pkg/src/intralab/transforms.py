"""Separable transform classes and energy-compaction measurement.

Each prediction mode maps to a fixed (horizontal, vertical) kernel
pair: Planar/DC use DCT-II both ways (class DC0); horizontal-set
angular modes 2..33 use DST-VII horizontally; the diagonal mode 34 uses
DST-VII both ways; vertical-set modes 35..66 use DST-VII vertically.
Kernels are orthonormal floating-point DCT-II / DST-VII matrices, so
coefficient energy equals residual energy (Parseval).
"""

from __future__ import annotations

import math
from enum import Enum
from functools import lru_cache

import numpy as np

TRANSFORM_SIZES = (4, 8, 16, 32)


class TransformClass(Enum):
    """(horizontal kernel, vertical kernel) per class."""

    DC0 = ("dct2", "dct2")
    H = ("dst7", "dct2")
    D = ("dst7", "dst7")
    V = ("dct2", "dst7")


def transform_class(mode: int) -> TransformClass:
    if mode in (0, 1):
        return TransformClass.DC0
    if 2 <= mode <= 33:
        return TransformClass.H
    if mode == 34:
        return TransformClass.D
    if 35 <= mode <= 66:
        return TransformClass.V
    raise ValueError(f"mode {mode} out of range 0..66")


@lru_cache(maxsize=None)
def dct2_matrix(n: int) -> np.ndarray:
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    mat = math.sqrt(2.0 / n) * np.cos(math.pi * (2 * m + 1) * k / (2 * n))
    mat[0] /= math.sqrt(2.0)
    return mat


@lru_cache(maxsize=None)
def dst7_matrix(n: int) -> np.ndarray:
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    return math.sqrt(4.0 / (2 * n + 1)) * np.sin(math.pi * (2 * m + 1) * (k + 1) / (2 * n + 1))


_KERNELS = {"dct2": dct2_matrix, "dst7": dst7_matrix}


def apply_transform(residual: np.ndarray, klass: TransformClass) -> np.ndarray:
    """Forward separable transform of a residual block."""
    residual = np.asarray(residual, dtype=np.float64)
    h, w = residual.shape
    if h not in TRANSFORM_SIZES or w not in TRANSFORM_SIZES:
        raise ValueError(f"residual dims {h}x{w} not in {TRANSFORM_SIZES}")
    hor_name, ver_name = klass.value
    hmat = _KERNELS[hor_name](w)
    vmat = _KERNELS[ver_name](h)
    return vmat @ residual @ hmat.T


def diagonal_scan(h: int, w: int) -> list[tuple[int, int]]:
    """Coefficient scan by ascending anti-diagonal, rows first within one."""
    return sorted(
        ((v, u) for v in range(h) for u in range(w)),
        key=lambda p: (p[0] + p[1], p[0]),
    )


def energy_compaction(coeffs: np.ndarray, k: int) -> float:
    """Fraction of total energy held by the k lowest-frequency coefficients.

    A zero block compacts perfectly by convention (returns 1.0).
    """
    h, w = coeffs.shape
    if not 1 <= k <= h * w:
        raise ValueError(f"k={k} out of range 1..{h * w}")
    energy = np.asarray(coeffs, dtype=np.float64) ** 2
    total = float(energy.sum())
    if total == 0.0:
        return 1.0
    scan = diagonal_scan(h, w)[:k]
    head = float(sum(energy[v, u] for v, u in scan))
    return head / total
