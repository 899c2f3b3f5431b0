"""Experiment harness: run configuration, frame encoding, replay, A/B deltas.

A run encodes one or more frames block by block, records everything in
a Report, and optionally replays the whole frame the way a decoder
would: re-deriving the fused modes from the committed reconstruction
alone and checking they match what the encoder chose.  TIMD-style
derivation only works if both sides reach the same answer, so the
replay is asserted, not sampled.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Any

import numpy as np

from .bvlist import DEFAULT_N_MAX, BvStore, build_bv_list
from .cost import METRICS
from .errors import ReplayMismatchError, ValidationError
from .etimd import (
    BlockResult,
    EncodeContext,
    coding_record_for,
    dc_fallback,
    encode_block,
    evaluate_candidates,
    fuse,
    fusion_predictions,
    select_modes_etimd,
    select_modes_timd,
)
from .frames import FORMATS, Frame, load_frame
from .grid import BLOCK_SIZES, ReconBuffer, partition, reconstruct_block
from .reporting import BlockRecord, Report, compute_aggregates
from .tmp import DEFAULT_SEARCH_RANGE, DEFAULT_TEMPLATE, bv_predict

TOOLS = ("etimd", "timd", "intratmp", "dc-only")


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings for one experiment run.

    search_range None means the full causal area.  seed only feeds
    fixture generation scripts; the encode itself is deterministic.
    """

    input_path: str
    input_format: str = "yuv-planar"
    width: int = 0
    height: int = 0
    bit_depth: int = 8
    frame_start: int = 0
    frame_count: int = 1
    block_size: int = 16
    tool: str = "etimd"
    metric: str = "satd"
    use_bv_list: bool = True
    use_ar_bv: bool = True
    use_hog_transform: bool = False
    tmp_compete: bool = True
    closed_loop: bool = False
    quant_step: int = 8
    search_range: int | None = DEFAULT_SEARCH_RANGE
    template: int = DEFAULT_TEMPLATE
    n_max: int = DEFAULT_N_MAX
    seed: int = 0
    parallel: bool = False
    measure_replay: bool = True


def validate_config(config: RunConfig) -> None:
    def require(ok: bool, message: str) -> None:
        if not ok:
            raise ValidationError(message)

    require(config.input_format in FORMATS, f"input_format must be one of {FORMATS}")
    require(config.tool in TOOLS, f"tool must be one of {TOOLS}")
    require(config.metric in METRICS, f"metric must be one of {METRICS}")
    require(config.block_size in BLOCK_SIZES, f"block_size must be one of {BLOCK_SIZES}")
    require(config.bit_depth in (8, 10), "bit_depth must be 8 or 10")
    require(config.width >= 1 and config.height >= 1, "width and height must be positive")
    require(config.frame_start >= 0, "frame_start must be >= 0")
    require(config.frame_count >= 1, "frame_count must be >= 1")
    require(config.template >= 1, "template must be >= 1")
    require(config.n_max >= 0, "n_max must be >= 0")
    require(config.quant_step >= 1, "quant_step must be >= 1")
    require(
        config.search_range is None or config.search_range >= 1,
        "search_range must be None (full) or >= 1",
    )


def config_from_dict(values: dict[str, Any]) -> RunConfig:
    """Build a RunConfig from a plain dict, rejecting unknown keys."""
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
    if "input_path" not in values:
        raise ValidationError("config needs input_path")
    return RunConfig(**values)


def encode_frame(
    frame: Frame, config: RunConfig
) -> tuple[list[BlockResult], ReconBuffer, BvStore]:
    """Encode every block of one frame in raster-scan order."""
    buf = ReconBuffer(frame.width, frame.height, frame.bit_depth)
    store = BvStore(frame.width, frame.height)
    ctx = EncodeContext(original=frame.samples.astype(np.int64), buf=buf, store=store, config=config)
    results = [encode_block(ctx, block) for block in partition(frame.width, frame.height, config.block_size)]
    return results, buf, store


def replay_frame(frame: Frame, config: RunConfig, results: list[BlockResult]) -> ReconBuffer:
    """Re-derive every block decoder-side and check it matches the encode.

    dc blocks need no derivation and intratmp blocks carry their BV as
    coded side info; timd/etimd fusions are re-derived from scratch off
    the committed reconstruction and must agree mode-for-mode.
    """
    buf = ReconBuffer(frame.width, frame.height, frame.bit_depth)
    store = BvStore(frame.width, frame.height)
    original = frame.samples.astype(np.int64)
    for res in results:
        block = res.block
        if res.tool == "dc":
            fusion, pred = dc_fallback(buf, block)
            predictions = [pred]
        elif res.tool == "intratmp":
            fusion = res.fusion
            predictions = [bv_predict(buf, block, fusion.modes[0].bv)]
        else:
            if res.tool == "etimd" and config.use_bv_list:
                bv_list = build_bv_list(
                    store, buf, block, config.template, config.n_max, use_ar=config.use_ar_bv
                )
            else:
                bv_list = []
            cands = evaluate_candidates(buf, block, config.template, config.metric, bv_list)
            fusion = select_modes_timd(cands) if res.tool == "timd" else select_modes_etimd(cands)
            _check_same_fusion(block, res, fusion)
            predictions = fusion_predictions(buf, block, fusion)

        prediction = fuse(predictions, fusion.weights, buf.bit_depth)
        if not np.array_equal(prediction, res.prediction):
            raise ReplayMismatchError(
                f"block {block.scan_index} at ({block.x0},{block.y0}): prediction diverged"
            )
        orig = original[block.y0 : block.y0 + block.h, block.x0 : block.x0 + block.w]
        recon = reconstruct_block(orig, prediction, config.closed_loop, config.quant_step, buf.bit_depth)
        buf.commit_block(block, recon)
        store.add(coding_record_for(block, res.tool, fusion))
    return buf


def _check_same_fusion(block: Any, res: BlockResult, fusion: Any) -> None:
    got = [(c.label(), c.cost) for c in fusion.modes]
    want = [(c.label(), c.cost) for c in res.fusion.modes]
    if got != want or fusion.weights != res.fusion.weights:
        raise ReplayMismatchError(
            f"block {block.scan_index} at ({block.x0},{block.y0}): "
            f"encoder derived {want}, replay derived {got}"
        )


def run_experiment(config: RunConfig) -> Report:
    """Encode the configured frames and assemble the full report."""
    validate_config(config)
    frames = [
        load_frame(
            config.input_path,
            config.input_format,
            config.width,
            config.height,
            bit_depth=config.bit_depth,
            frame_index=config.frame_start + i,
        )
        for i in range(config.frame_count)
    ]

    t0 = time.perf_counter()
    if config.parallel and len(frames) > 1:
        # frames are independent runs, so cross-frame threading is safe
        with ThreadPoolExecutor() as pool:
            encoded = list(pool.map(lambda f: encode_frame(f, config), frames))
    else:
        encoded = [encode_frame(f, config) for f in frames]
    timing = {"encode_s": time.perf_counter() - t0}

    if config.measure_replay:
        t1 = time.perf_counter()
        for frame, (results, _, _) in zip(frames, encoded):
            replay_frame(frame, config, results)
        timing["replay_s"] = time.perf_counter() - t1

    records = [
        BlockRecord.from_result(config.frame_start + i, res)
        for i, (results, _, _) in enumerate(encoded)
        for res in results
    ]
    return Report(
        config=asdict(config),
        records=records,
        aggregates=compute_aggregates(records, config.bit_depth),
        timing=timing,
    )


@dataclass
class RunDelta:
    """Block-matched comparison of run B against baseline run A."""

    n_blocks: int
    wins: int
    losses: int
    ties: int
    mean_sad_a: float
    mean_sad_b: float
    mean_sad_change_pct: float | None
    mean_satd_a: float
    mean_satd_b: float
    mean_satd_change_pct: float | None
    psnr_a_db: float
    psnr_b_db: float
    psnr_delta_db: float
    enc_time_ratio_pct: float | None
    replay_time_ratio_pct: float | None
    sad_deltas: list[int]

    @property
    def win_rate(self) -> float:
        return self.wins / self.n_blocks

    @property
    def tie_rate(self) -> float:
        return self.ties / self.n_blocks

    @property
    def non_loss_rate(self) -> float:
        return (self.wins + self.ties) / self.n_blocks

    def as_dict(self) -> dict[str, Any]:
        doc = asdict(self)
        doc["win_rate"] = self.win_rate
        doc["tie_rate"] = self.tie_rate
        doc["non_loss_rate"] = self.non_loss_rate
        return doc


def _pct_change(a: float, b: float) -> float | None:
    if a == 0:
        return None
    return 100.0 * (b - a) / a


def _ratio_pct(a: float | None, b: float | None) -> float | None:
    if a is None or b is None or a == 0:
        return None
    return 100.0 * b / a


def compare_runs(a: Report, b: Report) -> RunDelta:
    """Per-block deltas between two runs over the identical grid.

    Raises ValidationError unless both runs partitioned the same frames
    into the same blocks.  Lower prediction SAD in run B counts as a
    win for B.
    """
    if len(a.records) != len(b.records):
        raise ValidationError("runs cover different block counts")
    for ra, rb in zip(a.records, b.records):
        if (ra.frame, ra.scan_index, ra.x0, ra.y0, ra.w, ra.h) != (
            rb.frame,
            rb.scan_index,
            rb.x0,
            rb.y0,
            rb.w,
            rb.h,
        ):
            raise ValidationError("runs cover different block grids")

    sad_deltas = [rb.pred_sad - ra.pred_sad for ra, rb in zip(a.records, b.records)]
    wins = sum(1 for d in sad_deltas if d < 0)
    losses = sum(1 for d in sad_deltas if d > 0)
    ties = len(sad_deltas) - wins - losses

    n = len(a.records)
    mean_sad_a = sum(r.pred_sad for r in a.records) / n
    mean_sad_b = sum(r.pred_sad for r in b.records) / n
    mean_satd_a = sum(r.pred_satd for r in a.records) / n
    mean_satd_b = sum(r.pred_satd for r in b.records) / n
    psnr_a = a.aggregates["psnr_db"]
    psnr_b = b.aggregates["psnr_db"]
    psnr_delta = 0.0 if psnr_a == psnr_b else psnr_b - psnr_a

    return RunDelta(
        n_blocks=n,
        wins=wins,
        losses=losses,
        ties=ties,
        mean_sad_a=mean_sad_a,
        mean_sad_b=mean_sad_b,
        mean_sad_change_pct=_pct_change(mean_sad_a, mean_sad_b),
        mean_satd_a=mean_satd_a,
        mean_satd_b=mean_satd_b,
        mean_satd_change_pct=_pct_change(mean_satd_a, mean_satd_b),
        psnr_a_db=psnr_a,
        psnr_b_db=psnr_b,
        psnr_delta_db=psnr_delta,
        enc_time_ratio_pct=_ratio_pct(a.timing.get("encode_s"), b.timing.get("encode_s")),
        replay_time_ratio_pct=_ratio_pct(a.timing.get("replay_s"), b.timing.get("replay_s")),
        sad_deltas=sad_deltas,
    )
