"""Locate top-level ``tabular`` environments inside a LaTeX document."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

logger = logging.getLogger(__name__)

BEGIN = r"\begin{tabular}"
END = r"\end{tabular}"

_MARKER = re.compile(r"\\(begin|end)\s*\{tabular\}")


@dataclass(frozen=True)
class TabularSource:
    """Text of one ``\\begin{tabular} ... \\end{tabular}`` block.

    ``offset`` is the UTF-8 byte offset of the block inside the document it
    came from (0 when constructed directly).
    """

    raw: str
    origin: str | None = None
    offset: int = 0

    def __str__(self) -> str:
        return self.raw


@dataclass(frozen=True)
class ExtractWarning:
    origin: str | None
    offset: int
    message: str

    def line(self) -> str:
        return f"WARN {self.origin or '-'} {self.offset} {self.message}"


def _escaped(document: str, pos: int) -> bool:
    n = 0
    pos -= 1
    while pos >= 0 and document[pos] == "\\":
        n += 1
        pos -= 1
    return n % 2 == 1


def extract_tabulars(
    document: str,
    origin: str | None = None,
    warnings: list[ExtractWarning] | None = None,
) -> list[TabularSource]:
    """Return every top-level balanced tabular block, in document order.

    Nested tabulars stay embedded in their parent's text. An unmatched
    ``\\begin{tabular}`` is skipped (anything balanced inside it is still
    recovered) and a warning record is appended to ``warnings``.
    """
    stack: list[int] = []
    pairs: list[tuple[int, int]] = []
    problems: list[tuple[int, str]] = []
    for m in _MARKER.finditer(document):
        if _escaped(document, m.start()):
            continue
        if m.group(1) == "begin":
            stack.append(m.start())
        elif stack:
            pairs.append((stack.pop(), m.end()))
        else:
            problems.append((m.start(), "unmatched \\end{tabular}"))
    for start in stack:
        problems.append((start, "unbalanced \\begin{tabular} without matching end"))

    # a matched pair is top-level unless another matched pair encloses it
    pairs.sort()
    top: list[tuple[int, int]] = []
    for start, end in pairs:
        if top and start < top[-1][1]:
            continue
        top.append((start, end))

    byte_offset = _byte_offsets(document, [s for s, _ in top] + [p for p, _ in problems])
    for pos, msg in sorted(problems):
        w = ExtractWarning(origin, byte_offset[pos], msg)
        logger.warning(w.line())
        if warnings is not None:
            warnings.append(w)
    return [TabularSource(document[s:e], origin, byte_offset[s]) for s, e in top]


def _byte_offsets(document: str, positions: list[int]) -> dict[int, int]:
    if document.isascii():
        return {p: p for p in positions}
    return {p: len(document[:p].encode("utf-8")) for p in positions}
