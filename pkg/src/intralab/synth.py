"""Synthetic test content: noise, tiled glyphs, and screen-content pages.

The screen-content fixtures imitate the material template-matching
tools are built for: text lines, terminal output, tiled UI chrome and
icon grids.  Each one is densely textured and repeats with a short
spatial period, so a causal search can find exact matches while pure
angular prediction cannot.
"""

from __future__ import annotations

import numpy as np


def noise_frame(width: int, height: int, seed: int, bit_depth: int = 8) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, 1 << bit_depth, size=(height, width), dtype=np.uint16)


def tiled_glyph_frame(
    width: int, height: int, period: int, seed: int, bit_depth: int = 8
) -> np.ndarray:
    """A random period x period glyph repeated over the whole frame."""
    rng = np.random.default_rng(seed)
    glyph = rng.integers(0, 1 << bit_depth, size=(period, period), dtype=np.uint16)
    reps_y = -(-height // period)
    reps_x = -(-width // period)
    return np.tile(glyph, (reps_y, reps_x))[:height, :width].copy()


def _glyph(rng: np.random.Generator, h: int, w: int, fg: int, bg: int) -> np.ndarray:
    """A blocky random glyph with a guaranteed mix of ink and paper."""
    mask = rng.random((h, w)) < 0.45
    mask[0, 0] = True
    mask[-1, -1] = False
    return np.where(mask, fg, bg).astype(np.uint16)


def text_columns(seed: int, size: int = 256) -> np.ndarray:
    """Text-like rows of glyph cells, repeating horizontally every 16 px."""
    rng = np.random.default_rng(seed)
    strip = np.full((size, 16), 235, dtype=np.uint16)
    y = 0
    while y < size:
        line_h = 8
        for x in (0, 8):
            strip[y : y + line_h, x : x + 8] = _glyph(rng, line_h, 8, 20, 235)
        y += line_h
    return np.tile(strip, (1, size // 16))


def terminal_rows(seed: int, size: int = 256) -> np.ndarray:
    """Prompt-like glyph bands repeating vertically every 16 px."""
    rng = np.random.default_rng(seed)
    band = np.full((16, size), 16, dtype=np.uint16)
    for x in range(0, size, 8):
        band[0:8, x : x + 8] = _glyph(rng, 8, 8, 200, 16)
        band[8:16, x : x + 8] = _glyph(rng, 8, 8, 120, 16)
    return np.tile(band, (size // 16, 1))


def ui_tiles(seed: int, size: int = 256) -> np.ndarray:
    """A 32x32 widget motif (border, gradient, icon noise) tiled both ways."""
    rng = np.random.default_rng(seed)
    motif = np.zeros((32, 32), dtype=np.uint16)
    gradient = np.linspace(90, 170, 32).astype(np.uint16)
    motif[:] = gradient[None, :]
    motif[0, :] = motif[-1, :] = 250
    motif[:, 0] = motif[:, -1] = 250
    motif[8:24, 8:24] = _glyph(rng, 16, 16, 40, 210)
    return np.tile(motif, (size // 32, size // 32))


def icon_checker(seed: int, size: int = 256) -> np.ndarray:
    """An icon and its inverse alternating on a 32 px supertile."""
    rng = np.random.default_rng(seed)
    icon = _glyph(rng, 16, 16, 30, 220)
    inverse = (255 - icon).astype(np.uint16)
    supertile = np.block([[icon, inverse], [inverse, icon]])
    return np.tile(supertile, (size // 32, size // 32))


def mixed_page(seed: int, size: int = 256) -> np.ndarray:
    """Horizontally periodic text above, vertically periodic bands below."""
    top = text_columns(seed, size)[: size // 2]
    bottom = terminal_rows(seed + 1, size)[: size // 2]
    return np.vstack([top, bottom])


SCREEN_FIXTURES = {
    "text-columns": text_columns,
    "terminal-rows": terminal_rows,
    "ui-tiles": ui_tiles,
    "icon-checker": icon_checker,
    "mixed-page": mixed_page,
}
