"""Conventional 67-mode luma intra prediction.

Mode 0 is Planar, mode 1 is DC, modes 2..66 are angular with the
standard displacement table (mode 18 pure horizontal, mode 50 pure
vertical, mode 34 the top-left diagonal).  Angular prediction projects
each output sample onto the reference line at 1/32-sample precision and
applies a 2-tap linear interpolation; negative-angle modes extend the
main reference from the side reference the usual way.

Reference samples come from the causal reconstruction buffer.
Unavailable positions are padded by replicating the nearest available
sample along the reference border; a fully unavailable border pads to
mid-gray, 1 << (bit_depth - 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import ReconBuffer

MODE_PLANAR = 0
MODE_DC = 1
MODE_HOR = 18
MODE_DIAG = 34
MODE_VER = 50
ANGULAR_MODES = tuple(range(2, 67))
ALL_MODES = (MODE_PLANAR, MODE_DC) + ANGULAR_MODES

# Displacement per row step, in 1/32 sample units, for modes 2..66.
INTRA_PRED_ANGLE = (
    32, 29, 26, 23, 20, 18, 16, 14, 12, 10, 8, 6, 4, 3, 2, 1, 0,
    -1, -2, -3, -4, -6, -8, -10, -12, -14, -16, -18, -20, -23, -26, -29,
    -32,
    -29, -26, -23, -20, -18, -16, -14, -12, -10, -8, -6, -4, -3, -2, -1,
    0, 1, 2, 3, 4, 6, 8, 10, 12, 14, 16, 18, 20, 23, 26, 29, 32,
)

assert len(INTRA_PRED_ANGLE) == 65
assert INTRA_PRED_ANGLE[MODE_HOR - 2] == 0
assert INTRA_PRED_ANGLE[MODE_DIAG - 2] == -32
assert INTRA_PRED_ANGLE[MODE_VER - 2] == 0


def angle_of(mode: int) -> int:
    if not 2 <= mode <= 66:
        raise ValueError(f"mode {mode} is not angular")
    return INTRA_PRED_ANGLE[mode - 2]


def is_vertical(mode: int) -> bool:
    """Vertical-set modes read the above row as their main reference."""
    return mode >= 34


def mode_direction(mode: int) -> tuple[int, int]:
    """Prediction direction (dx, dy) in 1/32 units, y pointing down.

    A sample is predicted from the reference lying along this vector,
    e.g. mode 50 -> (0, -32) (straight up), mode 18 -> (-32, 0).
    """
    a = angle_of(mode)
    if is_vertical(mode):
        return (a, -32)
    return (-32, a)


@dataclass
class RefSamples:
    """Padded reference border of one block.

    above holds 2w + 1 samples starting at the top-left corner; left
    holds the 2h samples down the left edge (corner excluded).  The
    *_available masks record which positions held committed samples
    before padding.
    """

    above: np.ndarray
    left: np.ndarray
    above_available: np.ndarray
    left_available: np.ndarray


def _forward_fill(values: np.ndarray, available: np.ndarray, default: int) -> np.ndarray:
    if not available.any():
        return np.full_like(values, default)
    pos = np.where(available, np.arange(len(values)), -1)
    np.maximum.accumulate(pos, out=pos)
    first = int(np.argmax(available))
    pos[pos < 0] = first
    return values[pos]


def _note_runs(buf: ReconBuffer, xs: np.ndarray, ys: np.ndarray, taken: np.ndarray) -> None:
    """Report each contiguous run of actually-read border samples."""
    if buf.read_hook is None or not taken.any():
        return
    idx = np.flatnonzero(taken)
    splits = np.flatnonzero(np.diff(idx) > 1) + 1
    for run in np.split(idx, splits):
        x0, y0 = int(xs[run[0]]), int(ys[run[0]])
        x1, y1 = int(xs[run[-1]]), int(ys[run[-1]])
        buf.note_read(x0, y0, x1 - x0 + 1, y1 - y0 + 1)


def build_reference_samples(buf: ReconBuffer, x0: int, y0: int, w: int, h: int) -> RefSamples:
    """Gather and pad the reference border of the block at (x0, y0)."""
    default = 1 << (buf.bit_depth - 1)

    ax = np.arange(x0 - 1, x0 + 2 * w)
    above_avail = np.zeros(2 * w + 1, dtype=bool)
    above_vals = np.zeros(2 * w + 1, dtype=np.int64)
    if y0 - 1 >= 0:
        inside = (ax >= 0) & (ax < buf.width)
        cols = ax[inside]
        above_avail[inside] = buf.available[y0 - 1, cols]
        got = np.zeros(2 * w + 1, dtype=np.int64)
        got[inside] = buf.samples[y0 - 1, cols]
        above_vals = np.where(above_avail, got, 0)
        _note_runs(buf, ax, np.full_like(ax, y0 - 1), above_avail)

    ly = np.arange(y0, y0 + 2 * h)
    left_avail = np.zeros(2 * h, dtype=bool)
    left_vals = np.zeros(2 * h, dtype=np.int64)
    if x0 - 1 >= 0:
        inside = (ly >= 0) & (ly < buf.height)
        rows = ly[inside]
        left_avail[inside] = buf.available[rows, x0 - 1]
        got = np.zeros(2 * h, dtype=np.int64)
        got[inside] = buf.samples[rows, x0 - 1]
        left_vals = np.where(left_avail, got, 0)
        _note_runs(buf, np.full_like(ly, x0 - 1), ly, left_avail)

    # Pad along the border in one sweep: bottom of the left column up to
    # the corner, then across the above row.
    scan_vals = np.concatenate([left_vals[::-1], above_vals])
    scan_avail = np.concatenate([left_avail[::-1], above_avail])
    filled = _forward_fill(scan_vals, scan_avail, default)
    left_filled = filled[: 2 * h][::-1].copy()
    above_filled = filled[2 * h :]
    return RefSamples(above_filled, left_filled, above_avail, left_avail)


def _invert_angle(angle: int) -> int:
    return round(512 * 32 / abs(angle))


def _angular_core(main: np.ndarray, side: np.ndarray, n_scan: int, n_base: int, angle: int) -> np.ndarray:
    """Predict (n_scan, n_base) samples from a corner-anchored main reference.

    main[0] is the corner; main[i] runs along the main reference line.
    side mirrors it along the other border (side[0] is the corner too)
    and feeds the negative-index extension for angles below zero.
    """
    lo = n_scan
    ext = np.empty(lo + n_base + n_scan + 2, dtype=np.int64)
    idx = np.minimum(np.arange(n_base + n_scan + 2), len(main) - 1)
    ext[lo:] = main[idx]
    if angle < 0:
        inv = _invert_angle(angle)
        k = np.arange(1, n_scan + 1, dtype=np.int64)
        j = np.minimum((k * inv + 256) >> 9, len(side) - 1)
        ext[lo - 1 :: -1] = side[j]
    else:
        ext[:lo] = main[0]

    scan = np.arange(1, n_scan + 1, dtype=np.int64)
    proj = scan * angle
    whole = proj >> 5
    frac = proj & 31
    base = np.arange(n_base, dtype=np.int64)
    at = base[None, :] + whole[:, None] + 1 + lo
    w0 = (32 - frac)[:, None]
    w1 = frac[:, None]
    return (w0 * ext[at] + w1 * ext[at + 1] + 16) >> 5


def predict_angular(refs: RefSamples, mode: int, w: int, h: int) -> np.ndarray:
    """Angular prediction of a (h, w) block from padded references."""
    a = angle_of(mode)
    corner = refs.above[:1]
    left_ext = np.concatenate([corner, refs.left])
    if is_vertical(mode):
        return _angular_core(refs.above, left_ext, h, w, a)
    return _angular_core(left_ext, refs.above, w, h, a).T


def predict_dc(refs: RefSamples, w: int, h: int) -> np.ndarray:
    """Constant block at the rounded mean of w above + h left references."""
    total = int(refs.above[1 : w + 1].sum()) + int(refs.left[:h].sum())
    count = w + h
    val = (total + count // 2) // count
    return np.full((h, w), val, dtype=np.int64)


def predict_planar(refs: RefSamples, w: int, h: int) -> np.ndarray:
    """Planar prediction: mean of the two linear interpolations."""
    top = refs.above[1 : w + 2].astype(np.int64)
    left = refs.left[: h + 1].astype(np.int64)
    y = np.arange(h, dtype=np.int64)[:, None]
    x = np.arange(w, dtype=np.int64)[None, :]
    pred_v = (h - 1 - y) * top[None, :w] + (y + 1) * left[h]
    pred_h = (w - 1 - x) * left[:h, None] + (x + 1) * top[w]
    num = pred_v * w + pred_h * h
    return (num + w * h) // (2 * w * h)


def predict_mode(refs: RefSamples, mode: int, w: int, h: int) -> np.ndarray:
    if mode == MODE_PLANAR:
        return predict_planar(refs, w, h)
    if mode == MODE_DC:
        return predict_dc(refs, w, h)
    return predict_angular(refs, mode, w, h)
