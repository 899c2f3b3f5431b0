"""Per-block records, run aggregates, and report serialization.

A report is the unit of comparison between runs: a schema-versioned
JSON document holding the resolved configuration, one record per
encoded block, aggregate statistics, and wall-clock timings.  CSV
export flattens the records for spreadsheet work; JSON is the only
format read back.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import FormatError
from .etimd import BlockResult

SCHEMA_VERSION = 1

_CSV_COLUMNS = (
    "frame",
    "scan_index",
    "x0",
    "y0",
    "w",
    "h",
    "tool",
    "modes",
    "weights",
    "costs",
    "pred_sad",
    "pred_satd",
    "pred_sse",
    "bv_list_len",
    "n_primary",
    "n_ar",
    "transform_modes",
    "transform_class",
    "compaction",
    "pred_hash",
)


def prediction_hash(prediction: np.ndarray) -> str:
    """Short content hash of a prediction block, for replay checks."""
    return hashlib.sha1(np.ascontiguousarray(prediction, dtype="<u2").tobytes()).hexdigest()[:12]


@dataclass
class BlockRecord:
    """Flat, JSON-ready summary of one encoded block."""

    frame: int
    scan_index: int
    x0: int
    y0: int
    w: int
    h: int
    tool: str
    modes: list[str]
    weights: list[float]
    costs: list[int]
    pred_sad: int
    pred_satd: int
    pred_sse: int
    bv_list_len: int
    n_primary: int
    n_ar: int
    transform_modes: list[int] | None
    transform_class: str | None
    compaction: float | None
    pred_hash: str

    @classmethod
    def from_result(cls, frame_index: int, result: BlockResult) -> "BlockRecord":
        b = result.block
        return cls(
            frame=frame_index,
            scan_index=b.scan_index,
            x0=b.x0,
            y0=b.y0,
            w=b.w,
            h=b.h,
            tool=result.tool,
            modes=[c.label() for c in result.fusion.modes],
            weights=[float(w) for w in result.fusion.weights],
            costs=[int(c.cost) for c in result.fusion.modes],
            pred_sad=result.pred_sad,
            pred_satd=result.pred_satd,
            pred_sse=result.pred_sse,
            bv_list_len=result.bv_list_len,
            n_primary=result.n_primary,
            n_ar=result.n_ar,
            transform_modes=list(result.transform_modes) if result.transform_modes else None,
            transform_class=result.transform_class_name,
            compaction=result.compaction,
            pred_hash=prediction_hash(result.prediction),
        )


@dataclass
class Report:
    """One experiment run: config, per-block records, aggregates, timing."""

    config: dict[str, Any]
    records: list[BlockRecord]
    aggregates: dict[str, Any]
    timing: dict[str, float] = field(default_factory=dict)
    schema: int = SCHEMA_VERSION


def _primary_kind(label: str) -> str:
    if label.startswith("ang:"):
        return "angular"
    if label.startswith("bv:"):
        return "bv"
    return label


def compute_aggregates(records: Sequence[BlockRecord], bit_depth: int = 8) -> dict[str, Any]:
    """Run-level statistics over the block records.

    PSNR is reported on an 8-bit-equivalent scale so runs at different
    bit depths stay comparable; a lossless run reports infinity.
    """
    n = len(records)
    agg: dict[str, Any] = {"n_blocks": n}
    if n == 0:
        return agg

    area = sum(r.w * r.h for r in records)
    sse = sum(r.pred_sse for r in records)
    scale = 1 << (bit_depth - 8)
    if sse == 0:
        psnr = math.inf
    else:
        psnr = 10.0 * math.log10(255.0**2 * scale**2 * area / sse)

    tool_usage: dict[str, int] = {}
    kind_usage: dict[str, int] = {}
    class_usage: dict[str, int] = {}
    n_bv_fused = 0
    for r in records:
        tool_usage[r.tool] = tool_usage.get(r.tool, 0) + 1
        kind = _primary_kind(r.modes[0])
        kind_usage[kind] = kind_usage.get(kind, 0) + 1
        if any(m.startswith("bv:") for m in r.modes):
            n_bv_fused += 1
        if r.transform_class is not None:
            class_usage[r.transform_class] = class_usage.get(r.transform_class, 0) + 1

    costed = [r for r in records if r.tool != "dc"]
    compactions = [r.compaction for r in records if r.compaction is not None]

    agg["mean_pred_sad"] = sum(r.pred_sad for r in records) / n
    agg["mean_pred_satd"] = sum(r.pred_satd for r in records) / n
    agg["psnr_db"] = psnr
    agg["tool_usage"] = dict(sorted(tool_usage.items()))
    agg["primary_kind_usage"] = dict(sorted(kind_usage.items()))
    agg["bv_replacement_rate"] = n_bv_fused / n
    agg["mean_bv_list_len"] = sum(r.bv_list_len for r in records) / n
    agg["mean_primary_cost"] = sum(r.costs[0] for r in costed) / len(costed) if costed else None
    agg["transform_class_usage"] = dict(sorted(class_usage.items()))
    agg["mean_compaction"] = sum(compactions) / len(compactions) if compactions else None
    return agg


def write_report(report: Report, path: str, fmt: str = "json") -> None:
    """Serialize a report; fmt is "json" (full) or "csv" (records only).

    Writing the same Report twice produces byte-identical files.
    """
    if fmt == "json":
        doc = {
            "schema": report.schema,
            "config": report.config,
            "timing": report.timing,
            "aggregates": report.aggregates,
            "records": [asdict(r) for r in report.records],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, separators=(",", ":"))
            fh.write("\n")
    elif fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(_CSV_COLUMNS)
            for r in report.records:
                writer.writerow(_csv_row(r))
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def _csv_row(r: BlockRecord) -> list[str]:
    def join(values: Sequence[Any] | None) -> str:
        return "" if values is None else "|".join(str(v) for v in values)

    def num(value: float | None) -> str:
        return "" if value is None else f"{value:.12g}"

    return [
        str(r.frame),
        str(r.scan_index),
        str(r.x0),
        str(r.y0),
        str(r.w),
        str(r.h),
        r.tool,
        join(r.modes),
        join(f"{w:.12g}" for w in r.weights),
        join(r.costs),
        str(r.pred_sad),
        str(r.pred_satd),
        str(r.pred_sse),
        str(r.bv_list_len),
        str(r.n_primary),
        str(r.n_ar),
        join(r.transform_modes),
        r.transform_class or "",
        num(r.compaction),
        r.pred_hash,
    ]


def read_report(path: str) -> Report:
    """Load a JSON report written by write_report."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA_VERSION:
        raise FormatError(f"{path}: not a schema-{SCHEMA_VERSION} report")
    records = [BlockRecord(**r) for r in doc["records"]]
    return Report(
        config=doc["config"],
        records=records,
        aggregates=doc["aggregates"],
        timing=doc["timing"],
        schema=doc["schema"],
    )
