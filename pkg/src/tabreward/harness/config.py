"""Harness configuration loaded from a JSON file."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..grpo import HyperParams
from ..latex import DEFAULT_STRIP, Buckets, DEFAULT_BUCKETS, load_strip_list
from ..render import PreambleTemplate, RenderBridge, RenderConfig
from ..rewards import RewardConfig

KEYS = {"reward", "render", "grpo", "strip_list", "buckets", "template"}


@dataclass
class HarnessConfig:
    reward: RewardConfig = field(default_factory=RewardConfig)
    render: RenderConfig = field(default_factory=RenderConfig)
    hp: HyperParams = field(default_factory=HyperParams)
    buckets: Buckets = DEFAULT_BUCKETS
    strip: dict = field(default_factory=lambda: DEFAULT_STRIP)
    template: PreambleTemplate = field(default_factory=PreambleTemplate)

    @classmethod
    def load(cls, path: str | Path | None) -> "HarnessConfig":
        """Read a JSON config; relative file paths resolve against its directory.

        Example::

            {"reward": {"cwssim_threshold": 0.6, "teds_structure_threshold": 0.9},
             "render": {"dpi": 200, "margin": 8, "timeout": 20, "parallelism": 4},
             "grpo": {"epsilon": 0.2, "beta": 0.02},
             "strip_list": "strip.txt", "buckets": "100:160:2", "template": "preamble.tex"}
        """
        if path is None:
            return cls()
        path = Path(path)
        data = json.loads(path.read_text("utf-8"))
        unknown = set(data) - KEYS
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        base = path.parent

        def resolve(p):
            p = Path(p)
            return p if p.is_absolute() else base / p

        cfg = cls()
        if "reward" in data:
            cfg.reward = RewardConfig(**data["reward"])
        if "render" in data:
            cfg.render = RenderConfig.from_dict(data["render"])
        if "grpo" in data:
            cfg.hp = HyperParams(**data["grpo"])
        if data.get("buckets"):
            cfg.buckets = Buckets.parse(data["buckets"])
        if data.get("strip_list"):
            cfg.strip = load_strip_list(resolve(data["strip_list"]))
        if data.get("template"):
            cfg.template = PreambleTemplate.from_file(resolve(data["template"]))
        return cfg

    def bridge(self) -> RenderBridge:
        return RenderBridge(self.render, self.template)
