"""Binary visual / structure rewards for groups of candidate generations."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import grpo
from .cwssim import cw_ssim
from .latex import ParseError, TabularSource, clean, extract_tabulars, parse
from .render import BridgeUnavailable, RenderBridge
from .structure import StructTree, to_structure_tree
from .ted import teds_structure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RewardConfig:
    cwssim_threshold: float = 0.6
    teds_structure_threshold: float = 0.9

    def __post_init__(self):
        for name in ("cwssim_threshold", "teds_structure_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


def latex_to_tree(latex: TabularSource | str, strip=None) -> StructTree:
    """Clean, parse and convert LaTeX to a structure tree.

    When the text holds a ``\\begin{tabular}`` block the first top-level one
    is used. Raises :class:`ParseError` on any failure.
    """
    text = latex.raw if isinstance(latex, TabularSource) else latex
    if "\\begin" in text:
        blocks = extract_tabulars(text)
        if not blocks:
            raise ParseError("no balanced tabular environment found")
        text = blocks[0].raw
    try:
        return to_structure_tree(parse(clean(text, strip)))
    except ParseError:
        raise
    except (ValueError, IndexError) as exc:
        raise ParseError(str(exc)) from exc


def exceeds(value: float | None, threshold: float) -> int:
    """Binary reward: 1 iff ``value`` is present and strictly above ``threshold``."""
    return int(value is not None and value > threshold)


def visual_reward(pred_render, gt_render, cfg: RewardConfig = RewardConfig()) -> int:
    """1 iff the prediction rendered and CW-SSIM strictly exceeds the threshold."""
    if pred_render is None:
        return 0
    return exceeds(cw_ssim(pred_render, gt_render), cfg.cwssim_threshold)


def structure_reward(pred_latex, gt_latex, cfg: RewardConfig = RewardConfig()) -> int:
    try:
        pred = latex_to_tree(pred_latex)
    except ParseError as exc:
        logger.info("structure reward 0: prediction does not convert (%s)", exc)
        return 0
    gt = gt_latex if isinstance(gt_latex, StructTree) else latex_to_tree(gt_latex)
    return exceeds(teds_structure(pred, gt), cfg.teds_structure_threshold)


@dataclass
class CandidateOutcome:
    candidate_id: int
    compile_ok: bool
    convert_ok: bool
    cwssim_value: float | None
    teds_structure_value: float | None
    visual_reward: int
    structure_reward: int
    combined_reward: int
    error: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RewardGroup:
    image_id: str | None
    outcomes: list[CandidateOutcome]
    gt_latex: str
    gt_render: np.ndarray | None = field(default=None, repr=False)
    advantages: list[float] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def rewards(self) -> list[int]:
        return [o.combined_reward for o in self.outcomes]

    def to_dict(self) -> dict:
        return {
            "id": self.image_id,
            "outcomes": [o.to_dict() for o in self.outcomes],
            "rewards": self.rewards,
            "advantages": self.advantages,
            "warnings": self.warnings,
        }

    def jsonl(self) -> str:
        return "\n".join(json.dumps({"id": self.image_id, **o.to_dict()}) for o in self.outcomes)


def outcome(candidate_id, pred_latex, gt_tree, gt_render, pred_render, compiled, cfg) -> CandidateOutcome:
    """Assemble one candidate's rewards from its (possibly failed) render and parse."""
    cw = None
    if compiled and pred_render is not None and gt_render is not None:
        cw = cw_ssim(pred_render, gt_render)
    v = exceeds(cw, cfg.cwssim_threshold)
    error = ""
    try:
        ts = teds_structure(latex_to_tree(pred_latex), gt_tree)
    except ParseError as exc:
        ts = None
        error = str(exc)
    s = exceeds(ts, cfg.teds_structure_threshold)
    return CandidateOutcome(candidate_id, bool(compiled), ts is not None, cw, ts, v, s, v + s, error)


def score_group(
    gt_latex: str,
    gt_render,
    candidates: list[str],
    cfg: RewardConfig = RewardConfig(),
    bridge: RenderBridge | None = None,
    image_id: str | None = None,
) -> RewardGroup:
    """Score every candidate of one input against the ground truth.

    ``bridge=None`` (or an unusable toolchain) gives every candidate a
    visual reward of 0 and records a group warning; structure rewards are
    computed regardless. ``gt_render`` may be None, in which case the ground
    truth is rendered through ``bridge``.
    """
    if len(candidates) < 2:
        raise ValueError("a reward group needs at least 2 candidates")
    gt_tree = latex_to_tree(gt_latex)
    warnings: list[str] = []
    renders: list = [None] * len(candidates)
    compiled = [False] * len(candidates)
    if bridge is None:
        warnings.append("renderer disabled: visual rewards are 0")
    else:
        try:
            bridge.check()
        except BridgeUnavailable as exc:
            warnings.append(f"renderer unavailable ({exc}): visual rewards are 0")
            bridge = None
    if bridge is not None:
        if gt_render is None:
            gt_res = bridge.compile(gt_latex)
            gt_render = gt_res.image
            if gt_res.image is None:
                warnings.append(f"ground truth failed to render: {gt_res.reason}")
        results = bridge.compile_many(candidates)
        renders = [r.image for r in results]
        compiled = [r.compile_ok for r in results]
    for w in warnings:
        logger.warning("group %s: %s", image_id, w)

    def one(k):
        return outcome(k, candidates[k], gt_tree, gt_render, renders[k], compiled[k], cfg)

    with ThreadPoolExecutor(max_workers=min(8, len(candidates))) as pool:
        outcomes = list(pool.map(one, range(len(candidates))))
    group = RewardGroup(image_id, outcomes, gt_latex, gt_render, warnings=warnings)
    group.advantages = [float(a) for a in grpo.advantages(group.rewards)]
    return group
