"""Dual rewards and group-relative advantages for candidate files."""

from __future__ import annotations

import json
import logging
from collections import Counter, OrderedDict

import numpy as np
from PIL import Image

from .. import grpo
from ..rewards import score_group
from .config import HarnessConfig
from .corpus import load_corpus

logger = logging.getLogger(__name__)


def load_candidates(path) -> "OrderedDict[str, dict]":
    """Group candidate generations by record id.

    Accepts lines of either form::

        {"id": "...", "candidates": ["...", "..."], "logprobs": {...}}
        {"id": "...", "latex": "..."}          # one line per candidate
    """
    groups: OrderedDict[str, dict] = OrderedDict()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            rec = json.loads(line)
            if "id" not in rec:
                raise ValueError(f"{path}:{lineno}: candidate line without id")
            g = groups.setdefault(str(rec["id"]), {"candidates": []})
            if "candidates" in rec:
                g["candidates"].extend(rec["candidates"])
            elif "latex" in rec:
                g["candidates"].append(rec["latex"])
            else:
                raise ValueError(f"{path}:{lineno}: expected 'candidates' or 'latex'")
            if "logprobs" in rec:
                g["logprobs"] = rec["logprobs"]
    return groups


def reward_run(corpus_path, candidates_path, output_path=None, cfg: HarnessConfig | None = None,
               render: bool = True) -> dict:
    """Score each candidate group; write one JSON line per group; return a summary.

    When a group carries ``logprobs`` (``cur``/``old``/``ref`` lists, one per
    candidate) the objective / KL diagnostics are attached to its line.
    """
    cfg = cfg or HarnessConfig()
    corpus = {r["id"]: r for r in load_corpus(corpus_path)}
    groups = load_candidates(candidates_path)
    bridge = None
    if render:
        bridge = cfg.bridge()
        bridge.check()

    lines = []
    skipped = []
    hist: Counter = Counter()
    for gid, g in groups.items():
        rec = corpus.get(gid)
        if rec is None:
            skipped.append(f"{gid}: unknown id")
            continue
        if len(g["candidates"]) < 2:
            skipped.append(f"{gid}: group of {len(g['candidates'])} < 2")
            continue
        gt_render = None
        if bridge is not None and rec.get("gt_image"):
            with Image.open(rec["gt_image"]) as im:
                gt_render = np.asarray(im.convert("L"))
        group = score_group(rec["gt_latex"], gt_render, g["candidates"], cfg.reward, bridge, gid)
        out = group.to_dict()
        if "logprobs" in g:
            lp = g["logprobs"]
            seq = grpo.SequenceLogProbs(lp["cur"], lp["old"], lp["ref"])
            out["diagnostics"] = grpo.diagnostics(seq, group.advantages, cfg.hp)
        hist.update(group.rewards)
        lines.append(json.dumps(out))
    for s in skipped:
        logger.warning("skipped group %s", s)
    if output_path is not None:
        with open(output_path, "w", encoding="utf-8") as f:
            f.writelines(line + "\n" for line in lines)
    total = sum(hist.values())
    return {
        "groups": len(lines),
        "skipped": len(skipped),
        "skipped_reasons": skipped,
        "candidates": total,
        "reward_histogram": {str(k): hist.get(k, 0) for k in (0, 1, 2)},
        "mean_reward": (sum(k * v for k, v in hist.items()) / total) if total else None,
        "rendered": render,
        "lines": lines,
    }
