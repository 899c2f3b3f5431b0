"""Fixed-size block partitioning and the causal reconstruction buffer.

The encode loop walks blocks in raster order and commits one block of
reconstruction at a time.  Every sample any tool consumes for mode
derivation must come out of ReconBuffer.read_region, which refuses to
serve pixels that were never committed.  That refusal is the causality
contract: a violation is a bug in the caller, never padded over.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import CausalityError, CommitOrderError, ValidationError

BLOCK_SIZES = (4, 8, 16, 32, 64)

# Optional read observer: receives (x, y, w, h) for every rectangle of
# committed samples handed out.  Tests install one to audit causality.
ReadHook = Callable[[int, int, int, int], None]


@dataclass(frozen=True)
class BlockRef:
    """One block of the partition grid, in raster-scan order."""

    x0: int
    y0: int
    w: int
    h: int
    scan_index: int


def partition(frame_w: int, frame_h: int, block_size: int) -> list[BlockRef]:
    """Tile the frame into block_size squares, clipping at the edges."""
    if block_size not in BLOCK_SIZES:
        raise ValidationError(f"block_size must be one of {BLOCK_SIZES}, got {block_size}")
    if frame_w <= 0 or frame_h <= 0:
        raise ValidationError(f"frame dimensions must be positive, got {frame_w}x{frame_h}")
    blocks = []
    idx = 0
    for y0 in range(0, frame_h, block_size):
        for x0 in range(0, frame_w, block_size):
            blocks.append(
                BlockRef(
                    x0=x0,
                    y0=y0,
                    w=min(block_size, frame_w - x0),
                    h=min(block_size, frame_h - y0),
                    scan_index=idx,
                )
            )
            idx += 1
    return blocks


class ReconBuffer:
    """Per-pixel reconstruction plane plus availability flags.

    samples holds committed reconstruction values (int32); available is
    True exactly where a block has been committed.
    """

    def __init__(self, width: int, height: int, bit_depth: int):
        self.width = width
        self.height = height
        self.bit_depth = bit_depth
        self.samples = np.zeros((height, width), dtype=np.int32)
        self.available = np.zeros((height, width), dtype=bool)
        self.n_committed = 0
        self.read_hook: ReadHook | None = None

    def in_frame(self, x: int, y: int, w: int, h: int) -> bool:
        return x >= 0 and y >= 0 and x + w <= self.width and y + h <= self.height

    def region_available(self, x: int, y: int, w: int, h: int) -> bool:
        """True iff the whole rectangle is inside the frame and committed."""
        if w <= 0 or h <= 0:
            return True
        if not self.in_frame(x, y, w, h):
            return False
        return bool(self.available[y : y + h, x : x + w].all())

    def note_read(self, x: int, y: int, w: int, h: int) -> None:
        if self.read_hook is not None and w > 0 and h > 0:
            self.read_hook(x, y, w, h)

    def read_region(self, x: int, y: int, w: int, h: int) -> np.ndarray:
        """Return committed samples; any uncommitted pixel is an error."""
        if w < 0 or h < 0:
            raise ValueError(f"negative region {w}x{h}")
        if w == 0 or h == 0:
            return np.zeros((h, w), dtype=np.int32)
        if not self.in_frame(x, y, w, h):
            raise CausalityError(
                f"read ({x},{y}) {w}x{h} reaches outside the {self.width}x{self.height} frame"
            )
        region_flags = self.available[y : y + h, x : x + w]
        if not region_flags.all():
            raise CausalityError(f"read ({x},{y}) {w}x{h} touches uncommitted samples")
        self.note_read(x, y, w, h)
        return self.samples[y : y + h, x : x + w].copy()

    def commit_block(self, block: BlockRef, recon: np.ndarray) -> None:
        """Commit the next block in scan order; recommit or skip is an error."""
        if block.scan_index != self.n_committed:
            raise CommitOrderError(
                f"block {block.scan_index} committed out of order "
                f"(expected {self.n_committed})"
            )
        if recon.shape != (block.h, block.w):
            raise ValueError(f"recon shape {recon.shape} != block {block.h}x{block.w}")
        region_flags = self.available[block.y0 : block.y0 + block.h, block.x0 : block.x0 + block.w]
        if region_flags.any():
            raise CommitOrderError(
                f"block {block.scan_index} overlaps already-committed samples"
            )
        self.samples[block.y0 : block.y0 + block.h, block.x0 : block.x0 + block.w] = recon
        region_flags[:] = True
        self.n_committed += 1


def reconstruct_block(
    original: np.ndarray,
    prediction: np.ndarray,
    closed_loop: bool,
    quant_step: int,
    bit_depth: int,
) -> np.ndarray:
    """Produce the reconstruction the buffer will commit for one block.

    Open loop commits the original samples.  Closed loop commits
    prediction plus the residual quantized to multiples of quant_step
    (round half up), clipped to the sample range.
    """
    if not closed_loop:
        return original.astype(np.int32)
    if quant_step < 1:
        raise ValidationError(f"quant_step must be >= 1, got {quant_step}")
    residual = original.astype(np.int64) - prediction.astype(np.int64)
    levels = np.floor(residual / quant_step + 0.5).astype(np.int64)
    recon = prediction.astype(np.int64) + levels * quant_step
    return np.clip(recon, 0, (1 << bit_depth) - 1).astype(np.int32)
