import numpy as np
import pytest

from intralab.etimd import ModeCandidate
from intralab.hog import (
    build_hog,
    dominant_mode,
    gradient_field,
    orientation_to_mode,
    sobel_window,
    transform_mode_for_block,
)


def stripes(direction: str, size: int = 32, band: int = 4, lo: int = 40, hi: int = 210) -> np.ndarray:
    y, x = np.mgrid[0:size, 0:size]
    coord = {"h": y, "v": x, "rising": x + y, "falling": x - y}[direction]
    return np.where((coord // band) % 2 == 0, lo, hi).astype(np.int64)


def test_sobel_window_hand_values():
    w = np.array([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    # columns differ by +1 -> g_hor = 1+2+1 twice, rows by +3
    assert sobel_window(w) == (8, 24)
    assert sobel_window(np.full((3, 3), 7)) == (0, 0)
    with pytest.raises(ValueError):
        sobel_window(np.zeros((4, 3)))


def test_gradient_field_matches_windowed_loop(rng):
    samples = rng.integers(0, 256, size=(9, 13)).astype(np.int64)
    g_hor, g_ver = gradient_field(samples)
    assert g_hor.shape == g_ver.shape == (7, 11)
    for i in range(7):
        for j in range(11):
            assert (g_hor[i, j], g_ver[i, j]) == sobel_window(samples[i : i + 3, j : j + 3])


def test_gradient_field_degenerate_sizes():
    g_hor, g_ver = gradient_field(np.zeros((2, 40)))
    assert g_hor.size == 0 and g_ver.size == 0


def test_orientation_pure_gradients():
    assert orientation_to_mode(0, 0) is None
    assert orientation_to_mode(100, 0) == 50  # vertical edge
    assert orientation_to_mode(0, 100) == 18  # horizontal edge
    # gradient up-right -> edge along the falling diagonal, and vice versa
    assert orientation_to_mode(100, -100) == 34
    assert orientation_to_mode(100, 100) == 2  # exact tie of modes 2/66 -> lower index


def test_histogram_empty_for_flat_and_tiny_blocks():
    assert not build_hog(np.full((16, 16), 128)).any()
    assert not build_hog(np.zeros((2, 2))).any()


def test_histogram_votes_skip_planar_dc_bins(rng):
    hog = build_hog(rng.integers(0, 256, size=(16, 16)))
    assert hog[0] == 0 and hog[1] == 0
    assert hog.sum() > 0


def test_dominant_mode_for_stripe_orientations():
    assert dominant_mode(build_hog(stripes("h"))) == 18
    assert dominant_mode(build_hog(stripes("v"))) == 50
    assert dominant_mode(build_hog(stripes("rising"))) == 2
    assert dominant_mode(build_hog(stripes("falling"))) == 34


def test_magnitude_weighting_scales_votes():
    samples = stripes("v")
    plain = build_hog(samples)
    weighted = build_hog(samples, magnitude_weighted=True)
    assert weighted[50] > plain[50]
    assert (weighted[plain == 0] == 0).all()


def test_magnitude_weighting_can_flip_dominance():
    # two vertical-edge votes against one horizontal edge 100x stronger
    samples = np.zeros((5, 5), dtype=np.int64)
    samples[:, 3:] = 2
    samples[4, :] = 900
    plain = build_hog(samples)
    weighted = build_hog(samples, magnitude_weighted=True)
    assert dominant_mode(plain) != dominant_mode(weighted)


def test_dominant_mode_edge_cases():
    assert dominant_mode(np.zeros(67, dtype=np.int64)) is None
    hog = np.zeros(67, dtype=np.int64)
    hog[30] = 5
    hog[44] = 5
    assert dominant_mode(hog) == 30  # tie to the lower index


def _cand(kind: str, mode: int | None = None) -> ModeCandidate:
    return ModeCandidate(kind=kind, cost=0, mode=mode)


def test_transform_modes_pass_through_angular():
    preds = [np.zeros((8, 8)), np.zeros((8, 8))]
    got = transform_mode_for_block([_cand("angular", 30), _cand("planar", 0)], preds)
    assert got == [30, 0]


def test_transform_modes_replace_bv_with_hog():
    got = transform_mode_for_block(
        [_cand("bv"), _cand("angular", 40)], [stripes("h"), np.zeros((8, 8))]
    )
    assert got == [18, 40]


def test_transform_modes_flat_bv_predictor_falls_back_to_planar():
    got = transform_mode_for_block([_cand("bv")], [np.full((8, 8), 77)])
    assert got == [0]


def test_transform_modes_consider_first_two_only():
    cands = [_cand("angular", 30), _cand("dc", 1), _cand("bv")]
    preds = [np.zeros((8, 8))] * 3
    assert transform_mode_for_block(cands, preds) == [30, 1]
