"""Intra template matching prediction (IntraTMP).

A block vector (dx, dy) points at an already-reconstructed block whose
samples are copied verbatim as the prediction.  Candidates are ranked
by the matching cost between the current block's Gamma-template (an
above strip of (w + t) x t samples including the corner extension, and
a left strip of t x h samples) and the same-shaped template at the
displaced position.

Validity of a candidate is causal: the displaced block must be fully
committed.  Each template strip the current block actually has must,
at the displaced position, be either fully committed (it is costed) or
fully outside the frame (it contributes nothing); anything in between
rejects the candidate.  Strict-template mode, used when candidates must
be cost-comparable against template predictions, additionally rejects
candidates whose displaced strips fall outside the frame.

Ties in the search are broken toward smaller |dx| + |dy|, then smaller
dy, then smaller dx, making results order-independent and repeatable.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .cost import block_cost, satd_batch
from .grid import BlockRef, ReconBuffer

DEFAULT_TEMPLATE = 4
DEFAULT_SEARCH_RANGE = 64


class BlockVector(NamedTuple):
    dx: int
    dy: int


class SearchResult(NamedTuple):
    bv: BlockVector
    cost: int


Rect = tuple[int, int, int, int]


def template_rects(block: BlockRef, t: int, frame_w: int, frame_h: int) -> tuple[Rect | None, Rect | None]:
    """Frame-clipped (above, left) strip rectangles, None when absent."""
    x0, y0 = block.x0, block.y0
    above = None
    if y0 > 0:
        ax = max(x0 - t, 0)
        ay = max(y0 - t, 0)
        above = (ax, ay, x0 + block.w - ax, y0 - ay)
    left = None
    if x0 > 0:
        lx = max(x0 - t, 0)
        left = (lx, y0, x0 - lx, block.h)
    return above, left


def _shift(rect: Rect, bv: BlockVector) -> Rect:
    x, y, w, h = rect
    return (x + bv.dx, y + bv.dy, w, h)


def _fully_outside(rect: Rect, frame_w: int, frame_h: int) -> bool:
    x, y, w, h = rect
    return x + w <= 0 or y + h <= 0 or x >= frame_w or y >= frame_h


def extract_template(buf: ReconBuffer, block: BlockRef, t: int) -> tuple[np.ndarray | None, np.ndarray | None]:
    """Committed samples of the block's own template strips."""
    above_rect, left_rect = template_rects(block, t, buf.width, buf.height)
    above = buf.read_region(*above_rect) if above_rect else None
    left = buf.read_region(*left_rect) if left_rect else None
    return above, left


def template_at_bv(buf: ReconBuffer, block: BlockRef, bv: BlockVector, t: int) -> tuple[np.ndarray | None, np.ndarray | None]:
    """Template strips at the displaced position (raises when uncommitted)."""
    above_rect, left_rect = template_rects(block, t, buf.width, buf.height)
    above = buf.read_region(*_shift(above_rect, bv)) if above_rect else None
    left = buf.read_region(*_shift(left_rect, bv)) if left_rect else None
    return above, left


def bv_predict(buf: ReconBuffer, block: BlockRef, bv: BlockVector) -> np.ndarray:
    """Copy the displaced block as the prediction."""
    return buf.read_region(block.x0 + bv.dx, block.y0 + bv.dy, block.w, block.h)


def candidate_valid(
    buf: ReconBuffer,
    block: BlockRef,
    bv: BlockVector,
    t: int,
    strict_template: bool = True,
) -> bool:
    """Causality check for one candidate; (0, 0) always fails."""
    if not buf.region_available(block.x0 + bv.dx, block.y0 + bv.dy, block.w, block.h):
        return False
    for rect in template_rects(block, t, buf.width, buf.height):
        if rect is None:
            continue
        moved = _shift(rect, bv)
        if buf.region_available(*moved):
            continue
        if not strict_template and _fully_outside(moved, buf.width, buf.height):
            continue
        return False
    return True


def template_cost_at(
    buf: ReconBuffer,
    block: BlockRef,
    bv: BlockVector,
    t: int,
    metric: str,
) -> int:
    """Matching cost of a valid candidate, strip by strip."""
    total = 0
    for rect in template_rects(block, t, buf.width, buf.height):
        if rect is None:
            continue
        moved = _shift(rect, bv)
        if _fully_outside(moved, buf.width, buf.height):
            continue
        cur = buf.read_region(*rect)
        ref = buf.read_region(*moved)
        total += block_cost(ref, cur, metric)
    return total


def _integral(available: np.ndarray) -> np.ndarray:
    h, w = available.shape
    ii = np.zeros((h + 1, w + 1), dtype=np.int64)
    ii[1:, 1:] = available.cumsum(0).cumsum(1)
    return ii


def _rect_full(ii: np.ndarray, x, y, w: int, h: int):
    return (ii[y + h, x + w] - ii[y, x + w] - ii[y + h, x] + ii[y, x]) == w * h


def _strip_state(ii, frame_w, frame_h, rect, dxs, dys):
    """Per-candidate strip classification arrays (usable, fully_out)."""
    sx, sy, sw, sh = rect
    x = sx + dxs
    y = sy + dys
    fully_out = (x + sw <= 0) | (y + sh <= 0) | (x >= frame_w) | (y >= frame_h)
    fully_in = (x >= 0) & (y >= 0) & (x + sw <= frame_w) & (y + sh <= frame_h)
    xc = np.clip(x, 0, frame_w - sw)
    yc = np.clip(y, 0, frame_h - sh)
    usable = fully_in & _rect_full(ii, xc, yc, sw, sh)
    return usable, fully_out


def _strip_costs(buf, rect, dxs, dys, metric):
    """Matching cost of one strip for each (dx, dy) candidate."""
    sx, sy, sw, sh = rect
    cur = buf.read_region(*rect).astype(np.int64)
    wins = sliding_window_view(buf.samples, (sh, sw))
    refs = wins[sy + dys, sx + dxs].astype(np.int64)
    diffs = refs - cur[None]
    if metric == "sad" or sh < 4 or sw < 4:
        return np.abs(diffs).sum(axis=(1, 2))
    return satd_batch(diffs)


def tmp_search(
    buf: ReconBuffer,
    block: BlockRef,
    search_range: int | None = DEFAULT_SEARCH_RANGE,
    t: int = DEFAULT_TEMPLATE,
    metric: str = "satd",
    strict_template: bool = False,
) -> SearchResult | None:
    """Best causal block vector within the window, or None when none exists.

    search_range None searches the whole causal area of the frame.
    """
    x0, y0, w, h = block.x0, block.y0, block.w, block.h
    frame_w, frame_h = buf.width, buf.height
    rects = [r for r in template_rects(block, t, frame_w, frame_h) if r is not None]
    if not rects:
        return None

    if search_range is None:
        dx_lo, dx_hi = -x0, frame_w - w - x0
        dy_lo, dy_hi = -y0, frame_h - h - y0
    else:
        if search_range < 0:
            raise ValueError(f"search_range must be >= 0, got {search_range}")
        dx_lo, dx_hi = max(-search_range, -x0), min(search_range, frame_w - w - x0)
        dy_lo, dy_hi = max(-search_range, -y0), min(search_range, frame_h - h - y0)
    if dx_lo > dx_hi or dy_lo > dy_hi:
        return None

    dxs, dys = np.meshgrid(
        np.arange(dx_lo, dx_hi + 1, dtype=np.int64),
        np.arange(dy_lo, dy_hi + 1, dtype=np.int64),
    )
    dxs = dxs.ravel()
    dys = dys.ravel()

    ii = _integral(buf.available)
    valid = _rect_full(ii, x0 + dxs, y0 + dys, w, h)
    strip_use = []
    for rect in rects:
        usable, fully_out = _strip_state(ii, frame_w, frame_h, rect, dxs, dys)
        if strict_template:
            valid &= usable
        else:
            valid &= usable | fully_out
        strip_use.append(usable)
    if not valid.any():
        return None

    sel = np.flatnonzero(valid)
    dxs, dys = dxs[sel], dys[sel]
    costs = np.zeros(len(sel), dtype=np.int64)
    for rect, usable in zip(rects, strip_use):
        use = usable[sel]
        if not use.any():
            continue
        costs[use] += _strip_costs(buf, rect, dxs[use], dys[use], metric)
        if buf.read_hook is not None:
            sx, sy, sw, sh = rect
            for cx, cy in zip(dxs[use], dys[use]):
                buf.note_read(int(sx + cx), int(sy + cy), sw, sh)

    l1 = np.abs(dxs) + np.abs(dys)
    order = np.lexsort((dxs, dys, l1, costs))
    best = order[0]
    return SearchResult(BlockVector(int(dxs[best]), int(dys[best])), int(costs[best]))
