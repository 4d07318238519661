"""Score prediction files against a corpus, bucketed by table complexity."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from ..cwssim import cw_ssim
from ..latex import Buckets, ComplexityClass, ParseError, classify_complexity, parse, span_command_count
from ..rewards import latex_to_tree
from ..ted import teds, teds_structure
from .config import HarnessConfig
from .corpus import load_corpus

BUCKETS = tuple(c.value for c in ComplexityClass)
METRICS = ("cwssim", "compile_ratio", "teds", "teds_structure")


def load_predictions(path) -> dict[str, str]:
    preds: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            rec = json.loads(line)
            text = rec.get("latex", rec.get("prediction"))
            if "id" not in rec or text is None:
                raise ValueError(f"{path}:{lineno}: prediction needs 'id' and 'latex'")
            preds[str(rec["id"])] = text
    return preds


@dataclass
class BucketStats:
    count: int = 0
    cwssim: float | None = None
    compile_ratio: float | None = None
    teds: float | None = None
    teds_structure: float | None = None

    def to_dict(self, decimals: int | None = 4) -> dict:
        def r(v):
            return v if v is None or decimals is None else round(v, decimals)

        return {"count": self.count, **{m: r(getattr(self, m)) for m in METRICS}}


@dataclass
class MetricReport:
    buckets: dict[str, BucketStats]
    overall: BucketStats
    rendered: bool
    unknown_ids: int = 0
    missing_predictions: int = 0
    per_record: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self, decimals: int | None = 4) -> dict:
        return {
            "rendered": self.rendered,
            "buckets": {k: v.to_dict(decimals) for k, v in self.buckets.items()},
            "overall": self.overall.to_dict(decimals),
            "unknown_ids": self.unknown_ids,
            "missing_predictions": self.missing_predictions,
            "warnings": self.warnings,
        }

    def format_table(self) -> str:
        header = f"{'bucket':<10}{'count':>7}{'CW-SSIM':>10}{'compile':>10}{'TEDS':>10}{'TEDS-S':>10}"
        lines = [header, "-" * len(header)]
        rows = list(self.buckets.items()) + [("overall", self.overall)]
        for name, s in rows:
            cells = [
                "n/a" if getattr(s, m) is None else f"{getattr(s, m):.4f}"
                for m in METRICS
            ]
            lines.append(f"{name:<10}{s.count:>7}" + "".join(f"{c:>10}" for c in cells))
        if not self.rendered:
            lines.append("visual metrics absent (rendering disabled)")
        if self.unknown_ids or self.missing_predictions:
            lines.append(
                f"excluded: {self.unknown_ids} predictions with unknown ids, "
                f"{self.missing_predictions} records without predictions"
            )
        return "\n".join(lines)


def _mean(values) -> float | None:
    values = list(values)
    # fsum is exactly rounded, hence independent of record order
    return math.fsum(values) / len(values) if values else None


def _aggregate(rows: list[dict], rendered: bool) -> BucketStats:
    s = BucketStats(count=len(rows))
    if not rows:
        return s
    s.teds = _mean(r["teds"] for r in rows)
    s.teds_structure = _mean(r["teds_structure"] for r in rows)
    if rendered:
        s.cwssim = _mean(r["cwssim"] for r in rows)
        s.compile_ratio = _mean(1.0 if r["compile_ok"] else 0.0 for r in rows)
    return s


def _bucket(rec: dict, buckets: Buckets | None) -> str:
    if buckets is None and rec.get("complexity") in BUCKETS:
        return rec["complexity"]
    gt = rec["gt_latex"]
    return classify_complexity(parse(gt), span_command_count(gt), buckets or Buckets()).value


def evaluate_records(
    records: list[dict],
    predictions: dict[str, str],
    cfg: HarnessConfig | None = None,
    render: bool = True,
    buckets: Buckets | None = None,
) -> MetricReport:
    """Per record: TEDS / TEDS-Structure (0 on unparseable prediction) and,
    when ``render`` is set, compile status and CW-SSIM (0 if either render fails).
    """
    cfg = cfg or HarnessConfig()
    known = {r["id"] for r in records}
    unknown = sum(1 for pid in predictions if pid not in known)
    scored = [r for r in records if r["id"] in predictions]
    missing = len(records) - len(scored)

    pred_images: list = [None] * len(scored)
    gt_images: list = [None] * len(scored)
    compiled = [False] * len(scored)
    warnings: list[str] = []
    if render:
        bridge = cfg.bridge()
        bridge.check()
        results = bridge.compile_many(predictions[r["id"]] for r in scored)
        pred_images = [res.image for res in results]
        compiled = [res.compile_ok for res in results]
        need_gt = [k for k, r in enumerate(scored) if not r.get("gt_image")]
        for k, r in enumerate(scored):
            if r.get("gt_image"):
                with Image.open(r["gt_image"]) as im:
                    gt_images[k] = np.asarray(im.convert("L"))
        for k, res in zip(need_gt, bridge.compile_many(scored[k]["gt_latex"] for k in need_gt)):
            gt_images[k] = res.image
            if res.image is None:
                warnings.append(f"ground truth {scored[k]['id']} failed to render: {res.reason}")

    rows = []
    for k, rec in enumerate(scored):
        gt_tree = latex_to_tree(rec["gt_latex"], cfg.strip)
        try:
            pred_tree = latex_to_tree(predictions[rec["id"]], cfg.strip)
            t, ts, ok = teds(pred_tree, gt_tree), teds_structure(pred_tree, gt_tree), True
        except ParseError:
            t, ts, ok = 0.0, 0.0, False
        row = {
            "id": rec["id"],
            "bucket": _bucket(rec, buckets),
            "parse_ok": ok,
            "teds": t,
            "teds_structure": ts,
            "compile_ok": compiled[k] if render else None,
            "cwssim": None,
        }
        if render:
            if pred_images[k] is not None and gt_images[k] is not None:
                row["cwssim"] = cw_ssim(pred_images[k], gt_images[k])
            else:
                row["cwssim"] = 0.0
        rows.append(row)

    per_bucket = {b: _aggregate([r for r in rows if r["bucket"] == b], render) for b in BUCKETS}
    return MetricReport(
        per_bucket, _aggregate(rows, render), render, unknown, missing, rows, warnings
    )


def evaluate(predictions_path, corpus_path, cfg: HarnessConfig | None = None, render: bool = True,
             buckets: Buckets | None = None) -> MetricReport:
    return evaluate_records(load_corpus(corpus_path), load_predictions(predictions_path), cfg, render, buckets)
