"""Command line entry point: ``tabreward {build-corpus,evaluate,reward-run,metric}``.

Exit codes: 0 success, 1 usage or input error, 2 toolchain unavailable while
rendering was required.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
from PIL import Image

from ..cwssim import cw_ssim
from ..latex import Buckets, ParseError
from ..render import BridgeUnavailable
from ..rewards import latex_to_tree
from ..ted import teds, teds_structure
from .config import HarnessConfig
from .corpus import build_corpus
from .evaluate import evaluate
from .reward_run import reward_run

EXIT_OK, EXIT_USAGE, EXIT_TOOLCHAIN = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config (thresholds, render settings, hyperparameters)")
    p.add_argument("--no-render", action="store_true", help="skip compilation and visual metrics")
    p.add_argument("--buckets", help="override complexity buckets as MEDIUM_MIN:MEDIUM_MAX:MIN_SPANS")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tabreward", description="Table LaTeX corpus building, evaluation and reward computation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-corpus", help="extract, clean, parse and classify tabulars from .tex files")
    p.add_argument("source_dir")
    p.add_argument("output", help="corpus JSON Lines path")
    _common(p)

    p = sub.add_parser("evaluate", help="score predictions against a corpus per complexity bucket")
    p.add_argument("predictions", help="JSON Lines of {id, latex}")
    p.add_argument("corpus")
    p.add_argument("--output", help="write the machine-readable report here")
    p.add_argument("--per-record", help="write per-record scores as JSON Lines here")
    _common(p)

    p = sub.add_parser("reward-run", help="dual rewards and advantages for candidate groups")
    p.add_argument("corpus")
    p.add_argument("candidates", help="JSON Lines of candidate generations per id")
    p.add_argument("--output", help="write one JSON line per group here (default: stdout)")
    _common(p)

    p = sub.add_parser("metric", help="score one prediction against one ground truth")
    p.add_argument("pred", help="predicted LaTeX file ('-' for stdin)")
    p.add_argument("gt", help="ground-truth LaTeX file")
    p.add_argument("--pred-image", help="pre-rendered prediction image (skips compilation)")
    p.add_argument("--gt-image", help="pre-rendered ground-truth image")
    _common(p)
    return parser


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text("utf-8")


def _load_image(path):
    with Image.open(path) as im:
        return np.asarray(im.convert("L"))


def _metric(args, cfg: HarnessConfig) -> dict:
    pred, gt = _read(args.pred), _read(args.gt)
    out: dict = {}
    gt_tree = latex_to_tree(gt, cfg.strip)
    try:
        pred_tree = latex_to_tree(pred, cfg.strip)
        out.update(teds=teds(pred_tree, gt_tree), teds_structure=teds_structure(pred_tree, gt_tree), parse_ok=True)
    except ParseError as exc:
        out.update(teds=0.0, teds_structure=0.0, parse_ok=False, parse_error=str(exc))
    if args.pred_image and args.gt_image:
        out["cwssim"] = cw_ssim(_load_image(args.pred_image), _load_image(args.gt_image))
    elif not args.no_render:
        bridge = cfg.bridge()
        pr = _load_image(args.pred_image) if args.pred_image else bridge.compile(pred)
        gr = _load_image(args.gt_image) if args.gt_image else bridge.compile(gt)
        pimg = pr if isinstance(pr, np.ndarray) else pr.image
        gimg = gr if isinstance(gr, np.ndarray) else gr.image
        if not isinstance(pr, np.ndarray):
            out["compile_ok"] = pr.compile_ok
        out["cwssim"] = cw_ssim(pimg, gimg) if pimg is not None and gimg is not None else 0.0
    else:
        out["cwssim"] = None
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = HarnessConfig.load(args.config)
        if args.buckets:
            cfg.buckets = Buckets.parse(args.buckets)
        if args.command == "build-corpus":
            summary = build_corpus(args.source_dir, args.output, cfg.strip, cfg.buckets)
            for line in summary.pop("warning_lines"):
                print(line, file=sys.stderr)
            print(json.dumps(summary, indent=2))
        elif args.command == "evaluate":
            buckets = cfg.buckets if (args.buckets or args.config) else None
            report = evaluate(args.predictions, args.corpus, cfg, not args.no_render, buckets)
            print(report.format_table())
            if args.output:
                Path(args.output).write_text(json.dumps(report.to_dict(), indent=2) + "\n", "utf-8")
            if args.per_record:
                with open(args.per_record, "w", encoding="utf-8") as f:
                    f.writelines(json.dumps(r) + "\n" for r in report.per_record)
        elif args.command == "reward-run":
            summary = reward_run(args.corpus, args.candidates, args.output, cfg, not args.no_render)
            lines = summary.pop("lines")
            if args.output is None:
                for line in lines:
                    print(line)
            print(json.dumps(summary), file=sys.stderr if args.output is None else sys.stdout)
        elif args.command == "metric":
            print(json.dumps(_metric(args, cfg)))
    except BridgeUnavailable as exc:
        print(f"tabreward: {exc} (use --no-render to skip visual metrics)", file=sys.stderr)
        return EXIT_TOOLCHAIN
    except (OSError, ValueError) as exc:
        print(f"tabreward: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
