"""Compile tabular sources with an external LaTeX toolchain and rasterize them.

The toolchain is two configurable commands run in a fresh temporary
directory per job. Placeholders in the argument lists are substituted:
``{tex}``, ``{pdf}``, ``{png}`` (file names inside the job directory),
``{stem}`` (file name without suffix), ``{outdir}`` and ``{dpi}``.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import shutil
import signal
import subprocess
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .latex.extract import TabularSource

logger = logging.getLogger(__name__)

DEFAULT_PREAMBLE = r"""\documentclass[varwidth=\maxdimen,border=0pt]{standalone}
\usepackage[T1]{fontenc}
\usepackage{amsmath,amssymb}
\usepackage{array,booktabs,multirow,makecell,hhline}
\usepackage{graphicx}
\usepackage[table]{xcolor}
\pagestyle{empty}
\begin{document}
%%BODY%%
\end{document}
"""


class BridgeUnavailable(RuntimeError):
    """The configured compiler or rasterizer binary cannot be found."""


@dataclass(frozen=True)
class PreambleTemplate:
    text: str = DEFAULT_PREAMBLE
    placeholder: str = "%%BODY%%"

    def __post_init__(self):
        if self.text.count(self.placeholder) != 1:
            raise ValueError(f"template must contain {self.placeholder!r} exactly once")

    def render(self, body: str) -> str:
        return self.text.replace(self.placeholder, body)

    @classmethod
    def from_file(cls, path: str | Path) -> "PreambleTemplate":
        return cls(Path(path).read_text("utf-8"))


@dataclass(frozen=True)
class RenderConfig:
    compiler: tuple[str, ...] = ("pdflatex", "-interaction=nonstopmode", "-halt-on-error", "{tex}")
    rasterizer: tuple[str, ...] = (
        "pdftoppm", "-r", "{dpi}", "-gray", "-png", "-singlefile", "-f", "1", "-l", "1", "{pdf}", "{stem}",
    )
    dpi: int = 200
    margin: int = 8
    timeout: float = 20.0
    parallelism: int = field(default_factory=lambda: os.cpu_count() or 1)
    image_dir: str | None = None
    ink_threshold: int = 250

    @classmethod
    def from_dict(cls, d: dict) -> "RenderConfig":
        d = dict(d)
        for key in ("compiler", "rasterizer"):
            if key in d:
                d[key] = tuple(d[key])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown render config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class RenderResult:
    compile_ok: bool
    image: np.ndarray | None = None
    log_excerpt: str = ""
    wall_time: float = 0.0
    reason: str = ""
    image_path: str | None = None

    def record(self, job_id=None) -> dict:
        return {
            "job_id": job_id,
            "compile_ok": self.compile_ok,
            "reason": self.reason,
            "wall_time": round(self.wall_time, 3),
            "image_path": self.image_path,
            "shape": list(self.image.shape) if self.image is not None else None,
            "log_excerpt": self.log_excerpt,
        }


def _excerpt(text: str, limit: int = 800) -> str:
    lines = [ln for ln in text.splitlines() if ln.startswith("!") or "rror" in ln]
    chosen = "\n".join(lines) if lines else text
    return chosen[-limit:]


def crop_to_ink(img: np.ndarray, margin: int, threshold: int = 250) -> np.ndarray | None:
    """Crop to the bounding box of pixels darker than ``threshold`` plus ``margin``.

    Returns None for a blank page. The margin is padded with white where the
    box touches the page border.
    """
    ink = img < threshold
    if not ink.any():
        return None
    rows = np.flatnonzero(ink.any(axis=1))
    cols = np.flatnonzero(ink.any(axis=0))
    box = img[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1]
    return np.pad(box, margin, constant_values=255)


class RenderBridge:
    def __init__(self, config: RenderConfig | None = None, template: PreambleTemplate | None = None):
        self.config = config or RenderConfig()
        self.template = template or PreambleTemplate()

    def check(self) -> None:
        """Raise :class:`BridgeUnavailable` if either toolchain binary is missing."""
        for cmd in (self.config.compiler, self.config.rasterizer):
            if not cmd or shutil.which(cmd[0]) is None:
                raise BridgeUnavailable(f"toolchain command not found: {cmd[0] if cmd else '<empty>'}")

    def available(self) -> bool:
        try:
            self.check()
        except BridgeUnavailable:
            return False
        return True

    def _run(self, argv, cwd, deadline):
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise subprocess.TimeoutExpired(argv, 0)
        proc = subprocess.Popen(
            argv, cwd=cwd, stdin=subprocess.DEVNULL, stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT, start_new_session=True,
        )
        try:
            out, _ = proc.communicate(timeout=remaining)
        except subprocess.TimeoutExpired:
            try:
                os.killpg(proc.pid, signal.SIGKILL)
            except ProcessLookupError:
                pass
            proc.communicate()
            raise
        return proc.returncode, out.decode("utf-8", "replace")

    def compile(self, src: TabularSource | str, timeout: float | None = None) -> RenderResult:
        """Wrap ``src`` in the template, compile, rasterize page 1, crop to ink."""
        self.check()
        cfg = self.config
        body = src.raw if isinstance(src, TabularSource) else src
        timeout = cfg.timeout if timeout is None else timeout
        start = time.monotonic()
        deadline = start + timeout
        with tempfile.TemporaryDirectory(prefix="tabreward-") as tmp:
            stem = "job"
            subs = {
                "tex": f"{stem}.tex", "pdf": f"{stem}.pdf", "png": f"{stem}.png",
                "stem": stem, "outdir": tmp, "dpi": str(cfg.dpi),
            }
            Path(tmp, subs["tex"]).write_text(self.template.render(body), "utf-8")
            log = ""
            try:
                for step, cmd in (("compile", cfg.compiler), ("rasterize", cfg.rasterizer)):
                    argv = [part.format(**subs) for part in cmd]
                    code, out = self._run(argv, tmp, deadline)
                    log += out
                    if code != 0:
                        return RenderResult(False, None, _excerpt(log), time.monotonic() - start,
                                            f"{step} exited with status {code}")
            except subprocess.TimeoutExpired:
                return RenderResult(False, None, _excerpt(log), time.monotonic() - start,
                                    f"timeout after {timeout:g}s")
            png = Path(tmp, subs["png"])
            if not png.exists():
                return RenderResult(False, None, _excerpt(log), time.monotonic() - start,
                                    "rasterizer produced no image")
            with Image.open(png) as im:
                page = np.asarray(im.convert("L"), dtype=np.uint8)
        img = crop_to_ink(page, cfg.margin, cfg.ink_threshold)
        if img is None:
            return RenderResult(False, None, _excerpt(log), time.monotonic() - start, "empty page")
        path = self._save(img) if cfg.image_dir else None
        return RenderResult(True, img, "", time.monotonic() - start, "", path)

    def _save(self, img: np.ndarray) -> str:
        digest = hashlib.sha256(img.tobytes() + str(img.shape).encode()).hexdigest()[:16]
        out = Path(self.config.image_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{digest}.png"
        if not path.exists():
            Image.fromarray(img).save(path)
        return str(path)

    def compile_many(self, sources, timeout: float | None = None) -> list[RenderResult]:
        """Compile in a bounded worker pool; results keep input order."""
        self.check()
        sources = list(sources)
        workers = max(1, min(self.config.parallelism, len(sources)))
        if workers == 1:
            return [self.compile(s, timeout) for s in sources]
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda s: self.compile(s, timeout), sources))


def compile_latex(
    src: TabularSource | str,
    tpl: PreambleTemplate | None = None,
    timeout: float | None = None,
    config: RenderConfig | None = None,
) -> RenderResult:
    return RenderBridge(config, tpl).compile(src, timeout)


def compile_ratio(results) -> float:
    """Fraction of results that compiled."""
    results = list(results)
    if not results:
        raise ValueError("compile_ratio of an empty list")
    ok = sum(1 for r in results if (r.compile_ok if isinstance(r, RenderResult) else bool(r)))
    return ok / len(results)


def write_records(results, path, ids=None) -> None:
    ids = ids if ids is not None else range(len(results))
    with open(path, "w", encoding="utf-8") as f:
        for job_id, res in zip(ids, results):
            f.write(json.dumps(res.record(job_id)) + "\n")
