import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intralab.bvlist import BvCandidate, BvStore, Provenance, RecordTool
from intralab.etimd import (
    EncodeContext,
    ModeCandidate,
    compute_weights,
    derive_block_modes,
    encode_block,
    evaluate_candidates,
    fuse,
    select_modes_etimd,
    select_modes_timd,
)
from intralab.grid import ReconBuffer, partition
from intralab.harness import RunConfig
from intralab.synth import noise_frame, tiled_glyph_frame
from intralab.tmp import BlockVector, template_cost_at

from conftest import prefix_buffer


def ang(mode, cost):
    return ModeCandidate(kind="angular", cost=cost, mode=mode)


def planar(cost):
    return ModeCandidate(kind="planar", cost=cost, mode=0)


def dc(cost):
    return ModeCandidate(kind="dc", cost=cost, mode=1)


def bv(i, cost, dx=-8, dy=0):
    return ModeCandidate(kind="bv", cost=cost, bv=BlockVector(dx, dy), list_index=i)


# --- weights ---


def test_weights_single_mode():
    assert compute_weights([123]) == [1.0]
    assert compute_weights([0]) == [1.0]


def test_weights_two_modes_closed_form():
    w = compute_weights([10, 30])
    assert abs(w[0] - 30 / 40) < 1e-12
    assert abs(w[1] - 10 / 40) < 1e-12


def test_weights_three_modes_closed_form():
    losses = [10, 20, 30]
    w = compute_weights(losses)
    total = 60
    for wi, li in zip(w, losses):
        assert abs(wi - (total - li) / (2 * total)) < 1e-12


def test_weights_all_zero_uniform():
    assert compute_weights([0, 0, 0]) == [1 / 3, 1 / 3, 1 / 3]


def test_weights_empty_rejected():
    with pytest.raises(ValueError):
        compute_weights([])


@settings(max_examples=60, deadline=None)
@given(
    losses=st.lists(st.integers(0, 10_000), min_size=1, max_size=6),
    scale=st.integers(1, 97),
)
def test_weights_properties(losses, scale):
    w = compute_weights(losses)
    assert abs(sum(w) - 1.0) < 1e-9
    assert all(x >= 0 for x in w)
    # cheaper template loss never gets a smaller share
    for (la, wa), (lb, wb) in zip(zip(losses, w), list(zip(losses, w))[1:]):
        if la <= lb:
            assert wa >= wb - 1e-12
    ws = compute_weights([l * scale for l in losses])
    assert all(abs(a - b) < 1e-12 for a, b in zip(w, ws))


# --- fusion ---


def test_fuse_rounds_half_up():
    a = np.array([[0]], dtype=np.int64)
    b = np.array([[1]], dtype=np.int64)
    assert fuse([a, b], [0.5, 0.5], 8)[0, 0] == 1
    assert fuse([a, b], [0.75, 0.25], 8)[0, 0] == 0


def test_fuse_single_mode_identity(rng):
    pred = rng.integers(0, 256, size=(4, 4)).astype(np.int64)
    np.testing.assert_array_equal(fuse([pred], [1.0], 8), pred)


def test_fuse_clips_to_bit_depth():
    hot = np.array([[300]], dtype=np.int64)
    assert fuse([hot], [1.0], 8)[0, 0] == 255
    assert fuse([hot], [1.0], 10)[0, 0] == 300


def test_fuse_validates_pairing():
    with pytest.raises(ValueError):
        fuse([np.zeros((2, 2))], [0.5, 0.5], 8)
    with pytest.raises(ValueError):
        fuse([], [], 8)


# --- baseline TIMD selection ---


def test_timd_picks_best_angular():
    pool = [ang(30, 10), ang(40, 25), planar(100), dc(100)]
    fs = select_modes_timd(pool)
    assert [c.label() for c in fs.modes] == ["ang:30"]


def test_timd_second_angular_two_x_boundary():
    below = select_modes_timd([ang(30, 10), ang(40, 19), planar(99), dc(99)])
    assert [c.mode for c in below.modes] == [30, 40]
    at = select_modes_timd([ang(30, 10), ang(40, 20), planar(99), dc(99)])
    assert [c.mode for c in at.modes] == [30]


def test_timd_extra_mode_two_x_boundary():
    below = select_modes_timd([ang(30, 10), ang(40, 50), planar(19), dc(21)])
    assert [c.label() for c in below.modes] == ["ang:30", "planar"]
    at = select_modes_timd([ang(30, 10), ang(40, 50), planar(20), dc(20)])
    assert [c.label() for c in at.modes] == ["ang:30"]


def test_timd_extra_prefers_cheaper_of_planar_dc():
    fs = select_modes_timd([ang(30, 10), dc(12), planar(15)])
    assert [c.label() for c in fs.modes] == ["ang:30", "dc"]


def test_timd_ignores_bv_candidates():
    fs = select_modes_timd([ang(30, 10), bv(0, 1)])
    assert [c.label() for c in fs.modes] == ["ang:30"]


def test_timd_needs_angulars():
    with pytest.raises(ValueError):
        select_modes_timd([planar(1), dc(2)])


# --- E-TIMD selection ---


def test_etimd_primary_can_be_bv():
    fs = select_modes_etimd([ang(30, 50), planar(60), dc(70), bv(0, 10)])
    assert fs.modes[0].label() == "bv:-8:0"


def test_etimd_secondary_1_5x_boundary():
    # 2 * 14 < 3 * 10 holds; 2 * 15 < 3 * 10 does not
    included = select_modes_etimd([bv(0, 10), ang(30, 14), planar(99), dc(99)])
    assert len(included.modes) == 3  # secondary plus the unconditional third
    excluded = select_modes_etimd([bv(0, 10), ang(30, 15), planar(99), dc(99)])
    assert [c.label() for c in excluded.modes] == ["bv:-8:0"]


def test_etimd_third_is_cheapest_unused_non_angular():
    fs = select_modes_etimd([bv(0, 10), ang(30, 14), planar(40), dc(35), bv(1, 30, dx=-16)])
    assert [c.label() for c in fs.modes] == ["bv:-8:0", "ang:30", "bv:-16:0"]
    fs2 = select_modes_etimd([bv(0, 10), ang(30, 14), planar(40), dc(35), bv(1, 36, dx=-16)])
    assert [c.label() for c in fs2.modes] == ["bv:-8:0", "ang:30", "dc"]


def test_etimd_third_added_even_when_expensive():
    fs = select_modes_etimd([ang(30, 10), ang(31, 11), planar(10_000), dc(20_000)])
    assert [c.label() for c in fs.modes] == ["ang:30", "ang:31", "planar"]


def test_etimd_no_third_without_secondary():
    fs = select_modes_etimd([ang(30, 10), ang(31, 99), planar(1000), dc(1000)])
    assert [c.label() for c in fs.modes] == ["ang:30"]
    assert fs.weights == [1.0]


def test_etimd_two_non_angular_selected():
    # primary planar, secondary bv, third dc
    fs = select_modes_etimd([planar(10), bv(0, 12), dc(30), ang(30, 50)])
    assert [c.label() for c in fs.modes] == ["planar", "bv:-8:0", "dc"]


def test_etimd_equal_cost_kind_ranking():
    fs = select_modes_etimd([dc(7), bv(0, 7), planar(7), ang(5, 7)])
    assert [c.label() for c in fs.modes] == ["ang:5", "planar", "dc"]


def test_etimd_angular_ties_by_mode_index():
    fs = select_modes_etimd([ang(9, 7), ang(5, 7), planar(99), dc(99)])
    assert fs.modes[0].mode == 5


def test_etimd_bv_ties_by_list_index():
    fs = select_modes_etimd([bv(1, 7, dx=-16), bv(0, 7), ang(30, 99), planar(99), dc(99)])
    assert fs.modes[0].list_index == 0
    assert fs.modes[1].list_index == 1


def test_etimd_empty_pool_rejected():
    with pytest.raises(ValueError):
        select_modes_etimd([])


def test_etimd_all_zero_costs():
    # the strict 1.5x gate excludes a zero-cost runner-up against a
    # zero-cost primary, so a perfect template keeps a single mode
    fs = select_modes_etimd([ang(2, 0), ang(3, 0), planar(0), dc(0)])
    assert [c.label() for c in fs.modes] == ["ang:2"]
    assert fs.weights == [1.0]


def test_etimd_zero_primary_blocks_nonzero_secondary():
    fs = select_modes_etimd([ang(2, 0), ang(3, 1), planar(9), dc(9)])
    assert [c.label() for c in fs.modes] == ["ang:2"]


# --- candidate evaluation ---


def test_evaluate_counts_and_bv_costs():
    samples = tiled_glyph_frame(64, 64, period=8, seed=9)
    buf, blocks = prefix_buffer(samples, 8, 20)
    block = blocks[20]  # (32, 16)
    bvs = [
        BvCandidate(BlockVector(-8, -8), Provenance.PRIMARY),
        BvCandidate(BlockVector(-16, -8), Provenance.AUTO_RELOCATED),
    ]
    cands = evaluate_candidates(buf, block, 4, "satd", bvs)
    assert len(cands) == 67 + 2
    kinds = {c.kind for c in cands}
    assert kinds == {"angular", "planar", "dc", "bv"}
    for c in cands:
        if c.kind == "bv":
            assert c.cost == template_cost_at(buf, block, c.bv, 4, "satd")
    # the periodic repeat matches the template exactly
    exact = [c for c in cands if c.kind == "bv" and c.bv == BlockVector(-8, -8)]
    assert exact[0].cost == 0


def test_evaluate_requires_template():
    buf = ReconBuffer(32, 32, 8)
    block = partition(32, 32, 8)[0]
    with pytest.raises(ValueError):
        evaluate_candidates(buf, block, 4, "satd")


def test_evaluate_vertical_content_favors_vertical_mode():
    samples = np.tile(np.arange(64, dtype=np.uint16) * 3 % 251, (64, 1))
    buf, blocks = prefix_buffer(samples, 8, 20)
    cands = evaluate_candidates(buf, blocks[20], 4, "satd")
    best = min((c for c in cands if c.kind == "angular"), key=lambda c: (c.cost, c.mode))
    assert best.mode == 50
    assert best.cost == 0


# --- tool derivation and block encoding ---


def _ctx(samples, config, n_committed_blocks):
    buf, blocks = prefix_buffer(samples, config.block_size, n_committed_blocks)
    ctx = EncodeContext(
        original=np.asarray(samples, dtype=np.int64),
        buf=buf,
        store=BvStore(buf.width, buf.height),
        config=config,
    )
    return ctx, blocks


def _cfg(**kw):
    kw.setdefault("input_path", "unused")
    kw.setdefault("width", 64)
    kw.setdefault("height", 64)
    kw.setdefault("block_size", 8)
    return RunConfig(**kw)


def test_derive_dc_for_first_block():
    ctx, blocks = _ctx(noise_frame(64, 64, seed=20), _cfg(tool="etimd"), 0)
    tool, fusion, bv_list, found = derive_block_modes(ctx, blocks[0])
    assert tool == "dc" and fusion.weights == [1.0] and bv_list == [] and found is None


def test_derive_dc_only_tool():
    ctx, blocks = _ctx(noise_frame(64, 64, seed=21), _cfg(tool="dc-only"), 12)
    tool, fusion, _, _ = derive_block_modes(ctx, blocks[12])
    assert tool == "dc"
    assert fusion.modes[0].label() == "dc"


def test_derive_intratmp_finds_match():
    ctx, blocks = _ctx(tiled_glyph_frame(64, 64, period=8, seed=22), _cfg(tool="intratmp"), 12)
    tool, fusion, _, found = derive_block_modes(ctx, blocks[12])
    assert tool == "intratmp"
    assert found is not None and found.cost == 0
    assert fusion.modes[0].bv == found.bv and fusion.weights == [1.0]


def test_derive_intratmp_falls_back_to_dc():
    ctx, blocks = _ctx(noise_frame(64, 64, seed=23), _cfg(tool="intratmp", search_range=4), 1)
    tool, fusion, _, found = derive_block_modes(ctx, blocks[1])  # (8, 0)
    assert tool == "dc" and found is None


def test_derive_timd_all_template_modes():
    ctx, blocks = _ctx(noise_frame(64, 64, seed=24), _cfg(tool="timd"), 12)
    tool, fusion, bv_list, _ = derive_block_modes(ctx, blocks[12])
    assert tool == "timd" and bv_list == []
    assert all(c.kind in ("angular", "planar", "dc") for c in fusion.modes)


def test_derive_etimd_compete_switches_on_cheaper_search():
    samples = tiled_glyph_frame(64, 64, period=8, seed=25)
    ctx, blocks = _ctx(samples, _cfg(tool="etimd", tmp_compete=True), 12)
    tool, fusion, _, found = derive_block_modes(ctx, blocks[12])
    # angular fusion cannot reach cost 0 on glyph noise, the search can
    assert tool == "intratmp"
    assert found is not None and found.cost == 0


def test_derive_etimd_compete_needs_strict_improvement():
    flat = np.full((64, 64), 200, dtype=np.uint16)
    ctx, blocks = _ctx(flat, _cfg(tool="etimd", tmp_compete=True), 12)
    tool, fusion, _, found = derive_block_modes(ctx, blocks[12])
    assert tool == "etimd"  # fusion already at cost 0, search cannot beat it
    assert fusion.modes[0].cost == 0


def test_derive_etimd_without_compete_keeps_fusion():
    samples = tiled_glyph_frame(64, 64, period=8, seed=26)
    ctx, blocks = _ctx(samples, _cfg(tool="etimd", tmp_compete=False), 12)
    tool, _, _, found = derive_block_modes(ctx, blocks[12])
    assert tool == "etimd" and found is None


def test_derive_unknown_tool():
    class Odd:
        tool = "hevc"
        template = 4

    samples = noise_frame(64, 64, seed=27)
    buf, blocks = prefix_buffer(samples, 8, 12)
    ctx = EncodeContext(samples.astype(np.int64), buf, BvStore(64, 64), Odd())
    with pytest.raises(ValueError):
        derive_block_modes(ctx, blocks[12])


def test_encode_block_commits_and_records():
    samples = tiled_glyph_frame(64, 64, period=8, seed=28)
    cfg = _cfg(tool="etimd")
    ctx, blocks = _ctx(samples, cfg, 0)
    results = [encode_block(ctx, b) for b in blocks]
    assert ctx.buf.n_committed == len(blocks)
    # open loop commits the original samples
    np.testing.assert_array_equal(ctx.buf.samples, samples.astype(np.int32))
    assert len(ctx.store.records) == len(blocks)
    for res, rec in zip(results, ctx.store.records):
        if res.tool == "intratmp":
            assert rec.tool == RecordTool.INTRA_TMP and len(rec.bvs) == 1
        elif res.tool == "etimd":
            assert rec.tool == RecordTool.ETIMD
            assert len(rec.bvs) == sum(1 for c in res.fusion.modes if c.kind == "bv")
        else:
            assert rec.tool == RecordTool.OTHER and rec.bvs == ()
    assert any(res.tool == "intratmp" for res in results)


def test_encode_block_stats_consistent(rng):
    samples = noise_frame(64, 64, seed=29)
    cfg = _cfg(tool="timd")
    ctx, blocks = _ctx(samples, cfg, 0)
    for b in blocks[:9]:
        res = encode_block(ctx, b)
        orig = samples[b.y0 : b.y0 + b.h, b.x0 : b.x0 + b.w].astype(np.int64)
        assert res.pred_sad == int(np.abs(res.prediction - orig).sum())
        assert res.pred_sse == int(((res.prediction - orig) ** 2).sum())
        assert res.bv_list_len == res.n_primary + res.n_ar == 0


def test_encode_block_measures_transform():
    samples = tiled_glyph_frame(64, 64, period=8, seed=30)
    cfg = _cfg(tool="etimd", use_hog_transform=True)
    ctx, blocks = _ctx(samples, cfg, 0)
    results = [encode_block(ctx, b) for b in blocks[:12]]
    for res in results:
        assert res.transform_modes is not None
        assert res.transform_class_name in ("DC0", "H", "D", "V")
        assert res.compaction is None or 0.0 <= res.compaction <= 1.0
