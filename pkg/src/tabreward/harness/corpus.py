"""Build a JSON Lines corpus of cleaned, classified tabulars from local .tex trees."""

from __future__ import annotations

import hashlib
import json
import logging
from collections import Counter
from pathlib import Path

from ..latex import (
    DEFAULT_BUCKETS,
    DEFAULT_STRIP,
    Buckets,
    ComplexityClass,
    ExtractWarning,
    ParseError,
    cell_count,
    classify_complexity,
    clean,
    extract_tabulars,
    parse,
    span_command_count,
)

logger = logging.getLogger(__name__)


def content_id(latex: str) -> str:
    return hashlib.sha256(latex.encode("utf-8")).hexdigest()[:16]


def make_record(latex: str, strip=None, buckets: Buckets = DEFAULT_BUCKETS, record_id=None, **extra) -> dict:
    """Clean, parse and classify one tabular; raises ParseError if it does not parse."""
    cleaned = clean(latex, strip).raw
    model = parse(cleaned)
    spans = span_command_count(cleaned)
    record = {
        "id": record_id or content_id(cleaned),
        "gt_latex": cleaned,
        "complexity": classify_complexity(model, spans, buckets).value,
        "n_rows": model.n_rows,
        "n_cols": model.n_cols,
        "cells": cell_count(model),
        "span_commands": spans,
    }
    record.update({k: v for k, v in extra.items() if v is not None})
    return record


def build_corpus(source_dir, output_path, strip=None, buckets: Buckets = DEFAULT_BUCKETS) -> dict:
    """Extract -> clean -> parse -> classify every tabular under ``source_dir``.

    Writes one record per distinct table to ``output_path`` (JSON Lines) and
    returns a summary with the complexity distribution and warning lines.
    Output is deterministic for a given input tree.
    """
    root = Path(source_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"not a readable directory: {source_dir}")
    strip = DEFAULT_STRIP if strip is None else strip
    warnings: list[str] = []
    records: list[dict] = []
    seen: set[str] = set()
    duplicates = 0
    files = sorted(p for p in root.rglob("*.tex") if p.is_file())
    for path in files:
        rel = path.relative_to(root).as_posix()
        text = path.read_text("utf-8", errors="replace")
        extract_warnings: list[ExtractWarning] = []
        for block in extract_tabulars(text, rel, extract_warnings):
            try:
                record = make_record(block.raw, strip, buckets, origin=rel, offset=block.offset)
            except ParseError as exc:
                w = ExtractWarning(rel, block.offset, f"parse failed: {exc}")
                logger.warning(w.line())
                warnings.append(w.line())
                continue
            if record["id"] in seen:
                duplicates += 1
                continue
            seen.add(record["id"])
            records.append(record)
        warnings.extend(w.line() for w in extract_warnings)

    out = Path(output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")

    dist = Counter(r["complexity"] for r in records)
    total = len(records)
    return {
        "files": len(files),
        "records": total,
        "duplicates": duplicates,
        "warnings": len(warnings),
        "distribution": {c.value: dist.get(c.value, 0) for c in ComplexityClass},
        "fractions": {c.value: (dist.get(c.value, 0) / total if total else 0.0) for c in ComplexityClass},
        "warning_lines": warnings,
    }


def load_corpus(path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            rec = json.loads(line)
            if "gt_latex" not in rec:
                raise ValueError(f"{path}:{lineno}: record without gt_latex")
            if "id" not in rec:
                rec["id"] = content_id(rec["gt_latex"])
            records.append(rec)
    return records
