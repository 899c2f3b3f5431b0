"""Template-based intra mode derivation, baseline and enhanced.

Both tools predict the block's Gamma-template with every candidate and
rank candidates by template loss against the committed reconstruction,
so encoder and decoder can derive the same modes without signaling.

Baseline TIMD considers the 65 angular modes: the best one is primary,
the second-best joins when its loss is strictly below twice the best,
and the better of Planar/DC joins as an extra mode under the same
2x bound.

E-TIMD throws block-vector candidates into the same pool.  The global
best is primary, the runner-up joins under a strict 1.5x bound, and
whenever two modes were selected a third is added unconditionally: the
cheapest of Planar, DC and the not-yet-selected BV candidates.  Equal
costs rank Angular (ascending index) before Planar before DC before
BV (list order), which makes derivation deterministic.

Fusion weights follow the loss-proportional rule: each mode's weight is
the sum of the other selected losses over (N-1) times the total, so a
cheaper template predicts a larger share.  Selection and weights are
scale-invariant in the losses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .bvlist import BvCandidate, BvStore, CodingRecord, Provenance, RecordTool, build_bv_list
from .cost import sad, satd, satd_batch
from .grid import BlockRef, ReconBuffer, reconstruct_block
from .hog import transform_mode_for_block
from .intra import ALL_MODES, MODE_DC, MODE_PLANAR, build_reference_samples, predict_mode
from .tmp import BlockVector, SearchResult, bv_predict, template_cost_at, template_rects, tmp_search
from .transforms import TRANSFORM_SIZES, apply_transform, energy_compaction, transform_class

_KIND_RANK = {"angular": 0, "planar": 1, "dc": 2, "bv": 3}


@dataclass(frozen=True)
class ModeCandidate:
    """One entry of the shared candidate pool with its template loss."""

    kind: str
    cost: int
    mode: int | None = None
    bv: BlockVector | None = None
    list_index: int = -1

    def sort_key(self) -> tuple[int, int, int]:
        if self.kind == "angular":
            sub = self.mode
        elif self.kind == "bv":
            sub = self.list_index
        else:
            sub = 0
        return (self.cost, _KIND_RANK[self.kind], sub)

    def label(self) -> str:
        if self.kind == "angular":
            return f"ang:{self.mode}"
        if self.kind == "bv":
            return f"bv:{self.bv.dx}:{self.bv.dy}"
        return self.kind


@dataclass
class FusionSet:
    """Selected modes in ascending template-cost order, with weights."""

    modes: list[ModeCandidate]
    weights: list[float]


def compute_weights(losses: Sequence[float]) -> list[float]:
    """Loss-proportional fusion weights.

    A single mode takes weight 1; an all-zero loss vector degenerates to
    uniform weights.  Weights always sum to 1.
    """
    n = len(losses)
    if n == 0:
        raise ValueError("no losses")
    if n == 1:
        return [1.0]
    total = float(sum(losses))
    if total == 0.0:
        return [1.0 / n] * n
    return [(total - float(l)) / ((n - 1) * total) for l in losses]


def fuse(predictions: Sequence[np.ndarray], weights: Sequence[float], bit_depth: int) -> np.ndarray:
    """Weighted sum of predictions, rounded half up and clipped to range."""
    if len(predictions) != len(weights) or not predictions:
        raise ValueError("predictions and weights must pair up")
    acc = np.zeros(predictions[0].shape, dtype=np.float64)
    for pred, w in zip(predictions, weights):
        acc += float(w) * pred.astype(np.float64)
    out = np.floor(acc + 0.5)
    return np.clip(out, 0, (1 << bit_depth) - 1).astype(np.int32)


def _extended_region(block: BlockRef, t: int) -> tuple[int, int, int, int]:
    """Block grown by the template thickness on its causal sides."""
    ex0 = max(block.x0 - t, 0) if block.x0 > 0 else block.x0
    ey0 = max(block.y0 - t, 0) if block.y0 > 0 else block.y0
    return ex0, ey0, block.x0 + block.w - ex0, block.y0 + block.h - ey0


def evaluate_candidates(
    buf: ReconBuffer,
    block: BlockRef,
    t: int,
    metric: str,
    bv_list: Sequence[BvCandidate] = (),
) -> list[ModeCandidate]:
    """Template losses for Planar, DC, all angular modes, and listed BVs.

    Every candidate is costed on the identical template geometry: the
    frame-clipped above/left strips of the block.  Template predictions
    come from predicting the template-extended block from its own
    references; BV candidates copy the displaced template.
    """
    above_rect, left_rect = template_rects(block, t, buf.width, buf.height)
    if above_rect is None and left_rect is None:
        raise ValueError("block has no template; fall back to DC instead")

    ex0, ey0, we, he = _extended_region(block, t)
    refs = build_reference_samples(buf, ex0, ey0, we, he)
    ah = block.y0 - ey0
    lw = block.x0 - ex0

    cur_above = buf.read_region(*above_rect) if above_rect else None
    cur_left = buf.read_region(*left_rect) if left_rect else None

    above_diffs = [] if above_rect else None
    left_diffs = [] if left_rect else None
    for mode in ALL_MODES:
        pred = predict_mode(refs, mode, we, he)
        if above_rect:
            above_diffs.append(pred[:ah, :] - cur_above)
        if left_rect:
            left_diffs.append(pred[ah : ah + block.h, :lw] - cur_left)

    costs = np.zeros(len(ALL_MODES), dtype=np.int64)
    for diffs in (above_diffs, left_diffs):
        if diffs is None:
            continue
        stack = np.stack(diffs)
        if metric == "satd":
            costs += satd_batch(stack)
        else:
            costs += np.abs(stack).sum(axis=(1, 2))

    kind_of = {MODE_PLANAR: "planar", MODE_DC: "dc"}
    out = [
        ModeCandidate(kind=kind_of.get(mode, "angular"), cost=int(c), mode=mode)
        for mode, c in zip(ALL_MODES, costs)
    ]
    for i, cand in enumerate(bv_list):
        cost = template_cost_at(buf, block, cand.bv, t, metric)
        out.append(ModeCandidate(kind="bv", cost=cost, bv=cand.bv, list_index=i))
    return out


def _angulars(candidates: Sequence[ModeCandidate]) -> list[ModeCandidate]:
    return sorted((c for c in candidates if c.kind == "angular"), key=ModeCandidate.sort_key)


def select_modes_timd(candidates: Sequence[ModeCandidate]) -> FusionSet:
    """Baseline selection: best angular, 2x-gated runner-up, 2x-gated extra."""
    angulars = _angulars(candidates)
    if not angulars:
        raise ValueError("TIMD needs angular candidates")
    best = angulars[0]
    selected = [best]
    if len(angulars) > 1 and angulars[1].cost < 2 * best.cost:
        selected.append(angulars[1])
    extras = sorted(
        (c for c in candidates if c.kind in ("planar", "dc")), key=ModeCandidate.sort_key
    )
    if extras and extras[0].cost < 2 * best.cost:
        selected.append(extras[0])
    selected.sort(key=ModeCandidate.sort_key)
    return FusionSet(selected, compute_weights([c.cost for c in selected]))


def select_modes_etimd(candidates: Sequence[ModeCandidate]) -> FusionSet:
    """Enhanced selection over the merged angular + Planar/DC + BV pool.

    Runner-up joins iff strictly below 1.5x the primary loss (exact in
    integers as 2*L_sec < 3*L_fir); a third mode -- the cheapest unused
    member of {Planar, DC} or the BV list -- joins unconditionally
    whenever two modes were selected.
    """
    pool = sorted(candidates, key=ModeCandidate.sort_key)
    if not pool:
        raise ValueError("empty candidate pool")
    selected = [pool[0]]
    if len(pool) > 1 and 2 * pool[1].cost < 3 * pool[0].cost:
        selected.append(pool[1])
        for cand in pool:
            if cand.kind == "angular" or cand in selected:
                continue
            selected.append(cand)
            break
    selected.sort(key=ModeCandidate.sort_key)
    return FusionSet(selected, compute_weights([c.cost for c in selected]))


@dataclass
class BlockResult:
    """Everything the harness records about one encoded block."""

    block: BlockRef
    tool: str
    fusion: FusionSet
    prediction: np.ndarray = field(repr=False)
    recon: np.ndarray = field(repr=False)
    pred_sad: int = 0
    pred_satd: int = 0
    pred_sse: int = 0
    bv_list_len: int = 0
    n_primary: int = 0
    n_ar: int = 0
    transform_modes: tuple[int, ...] | None = None
    transform_class_name: str | None = None
    compaction: float | None = None


@dataclass
class EncodeContext:
    """Mutable per-frame state threaded through encode_block.

    config duck-types the run configuration (tool, metric, template,
    search_range, n_max, use_bv_list, use_ar_bv, use_hog_transform,
    tmp_compete, closed_loop, quant_step).
    """

    original: np.ndarray
    buf: ReconBuffer
    store: BvStore
    config: Any


def fusion_predictions(buf: ReconBuffer, block: BlockRef, fusion: FusionSet) -> list[np.ndarray]:
    refs = None
    preds = []
    for cand in fusion.modes:
        if cand.kind == "bv":
            preds.append(bv_predict(buf, block, cand.bv))
        else:
            if refs is None:
                refs = build_reference_samples(buf, block.x0, block.y0, block.w, block.h)
            preds.append(predict_mode(refs, cand.mode, block.w, block.h))
    return preds


def dc_fallback(buf: ReconBuffer, block: BlockRef) -> tuple[FusionSet, np.ndarray]:
    refs = build_reference_samples(buf, block.x0, block.y0, block.w, block.h)
    pred = predict_mode(refs, MODE_DC, block.w, block.h)
    fusion = FusionSet([ModeCandidate(kind="dc", cost=0, mode=MODE_DC)], [1.0])
    return fusion, pred


def _measure_transform(
    block: BlockRef,
    fusion: FusionSet,
    predictions: Sequence[np.ndarray],
    residual: np.ndarray,
) -> tuple[tuple[int, ...], str, float | None]:
    modes = tuple(transform_mode_for_block(fusion.modes, predictions))
    klass = transform_class(modes[0])
    compaction = None
    if block.h in TRANSFORM_SIZES and block.w in TRANSFORM_SIZES:
        coeffs = apply_transform(residual, klass)
        k = max(1, (block.h * block.w) // 4)
        compaction = energy_compaction(coeffs, k)
    return modes, klass.name, compaction


def derive_block_modes(
    ctx: EncodeContext, block: BlockRef
) -> tuple[str, FusionSet, list[BvCandidate], SearchResult | None]:
    """Shared encoder/replay derivation: tool choice and fusion set.

    Returns the tool label, the fusion set, the BV candidate list, and
    the template-matching search outcome (None when no search ran).
    """
    cfg = ctx.config
    above_rect, left_rect = template_rects(block, cfg.template, ctx.buf.width, ctx.buf.height)
    has_template = above_rect is not None or left_rect is not None

    if cfg.tool == "dc-only" or not has_template:
        fusion, _ = dc_fallback(ctx.buf, block)
        return "dc", fusion, [], None

    if cfg.tool == "intratmp":
        found = tmp_search(
            ctx.buf, block, cfg.search_range, cfg.template, cfg.metric, strict_template=False
        )
        if found is None:
            fusion, _ = dc_fallback(ctx.buf, block)
            return "dc", fusion, [], None
        cand = ModeCandidate(kind="bv", cost=found.cost, bv=found.bv, list_index=0)
        return "intratmp", FusionSet([cand], [1.0]), [], found

    if cfg.tool == "timd":
        cands = evaluate_candidates(ctx.buf, block, cfg.template, cfg.metric)
        return "timd", select_modes_timd(cands), [], None

    if cfg.tool != "etimd":
        raise ValueError(f"unknown tool {cfg.tool!r}")

    bv_list: list[BvCandidate] = []
    if cfg.use_bv_list:
        bv_list = build_bv_list(
            ctx.store, ctx.buf, block, cfg.template, cfg.n_max, use_ar=cfg.use_ar_bv
        )
    cands = evaluate_candidates(ctx.buf, block, cfg.template, cfg.metric, bv_list)
    fusion = select_modes_etimd(cands)

    if cfg.use_bv_list and cfg.tmp_compete:
        found = tmp_search(
            ctx.buf, block, cfg.search_range, cfg.template, cfg.metric, strict_template=True
        )
        if found is not None and found.cost < fusion.modes[0].cost:
            cand = ModeCandidate(kind="bv", cost=found.cost, bv=found.bv, list_index=0)
            return "intratmp", FusionSet([cand], [1.0]), bv_list, found
    return "etimd", fusion, bv_list, None


def encode_block(ctx: EncodeContext, block: BlockRef) -> BlockResult:
    """Derive modes, predict, reconstruct, commit, and record one block."""
    cfg = ctx.config
    tool, fusion, bv_list, _ = derive_block_modes(ctx, block)
    predictions = fusion_predictions(ctx.buf, block, fusion)
    prediction = fuse(predictions, fusion.weights, ctx.buf.bit_depth)

    orig = ctx.original[block.y0 : block.y0 + block.h, block.x0 : block.x0 + block.w].astype(
        np.int64
    )
    result = BlockResult(
        block=block,
        tool=tool,
        fusion=fusion,
        prediction=prediction,
        recon=np.zeros(0, dtype=np.int32),
        pred_sad=sad(prediction, orig),
        pred_satd=satd(prediction, orig),
        pred_sse=int(((prediction.astype(np.int64) - orig) ** 2).sum()),
        bv_list_len=len(bv_list),
        n_primary=sum(1 for c in bv_list if c.provenance == Provenance.PRIMARY),
        n_ar=sum(1 for c in bv_list if c.provenance == Provenance.AUTO_RELOCATED),
    )
    if cfg.use_hog_transform:
        residual = orig - prediction.astype(np.int64)
        result.transform_modes, result.transform_class_name, result.compaction = (
            _measure_transform(block, fusion, predictions, residual)
        )

    recon = reconstruct_block(orig, prediction, cfg.closed_loop, cfg.quant_step, ctx.buf.bit_depth)
    result.recon = recon
    ctx.buf.commit_block(block, recon)
    ctx.store.add(coding_record_for(block, tool, fusion))
    return result


def coding_record_for(block: BlockRef, tool: str, fusion: FusionSet) -> CodingRecord:
    """The BV-store entry a coded block leaves behind for its successors."""
    fused_bvs = tuple(c.bv for c in fusion.modes if c.kind == "bv")
    if tool == "intratmp":
        return CodingRecord(block, RecordTool.INTRA_TMP, fused_bvs)
    if tool == "etimd":
        return CodingRecord(block, RecordTool.ETIMD, fused_bvs)
    return CodingRecord(block, RecordTool.OTHER)
