"""Parse a tabular block into a logical grid of spanning cells."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ._scan import read_arg, read_command, read_group, read_optional, skip_ws, strip_comments
from .extract import TabularSource


class ParseError(ValueError):
    """Raised when a tabular cannot be turned into a consistent grid."""


@dataclass(frozen=True)
class Cell:
    content: str
    row: int
    col: int
    rowspan: int = 1
    colspan: int = 1

    @property
    def anchor(self) -> tuple[int, int]:
        return (self.row, self.col)

    def slots(self):
        for r in range(self.row, self.row + self.rowspan):
            for c in range(self.col, self.col + self.colspan):
                yield (r, c)


@dataclass(frozen=True)
class TableModel:
    n_rows: int
    n_cols: int
    cells: tuple[Cell, ...]
    column_spec: str = ""
    rules: tuple[tuple[int, str], ...] = field(default=())

    def grid(self) -> list[list[int]]:
        """Cell index covering each slot, as an ``n_rows x n_cols`` list."""
        g = [[-1] * self.n_cols for _ in range(self.n_rows)]
        for k, cell in enumerate(self.cells):
            for r, c in cell.slots():
                g[r][c] = k
        return g


# Horizontal rule commands and the number of mandatory args each takes.
# ``\cmidrule`` also accepts a ``(lr)`` trim spec, handled separately.
RULES = {
    "hline": 0,
    "cline": 1,
    "toprule": 0,
    "midrule": 0,
    "bottomrule": 0,
    "cmidrule": 1,
    "hhline": 1,
    "specialrule": 3,
    "noalign": 1,
    "addlinespace": 0,
    "morecmidrules": 0,
    "firsthline": 0,
    "lasthline": 0,
}

_HEAD = re.compile(r"\s*\\begin\s*\{(tabular\*?|tabularx|tabulary|array)\}")
_TAIL = re.compile(r"\\end\s*\{(tabular\*?|tabularx|tabulary|array)\}\s*$")


def count_columns(spec: str) -> int:
    """Number of columns declared by a tabular preamble such as ``|l|*{3}{c}|``."""
    n = 0
    i = 0
    while i < len(spec):
        ch = spec[i]
        if ch.isspace() or ch == "|" or ch == ":":
            i += 1
        elif ch in "@!<>":
            _, i = read_arg(spec, i + 1)
        elif ch == "*":
            reps, i = read_arg(spec, i + 1)
            inner, i = read_arg(spec, i)
            try:
                n += int(reps.strip()) * count_columns(inner)
            except ValueError:
                raise ParseError(f"bad column repeat count *{{{reps}}}") from None
        elif ch == "{":
            _, i = read_group(spec, i)
        elif ch == "[":
            _, i = read_group(spec, i, "[", "]")
        elif ch == "\\":
            _, i = read_command(spec, i)
        elif ch.isalpha():
            n += 1
            i += 1
            if ch in "pmb":
                _, i = read_arg(spec, i)
            elif ch in "wW":
                _, i = read_arg(spec, i)
                _, i = read_arg(spec, i)
        else:
            i += 1
    return n


def _split_header(raw: str) -> tuple[str, str]:
    text = strip_comments(raw)
    head = _HEAD.match(text)
    if head:
        text = text[head.end() :]
        tail = _TAIL.search(text)
        if tail is None:
            raise ParseError("missing \\end{tabular}")
        text = text[: tail.start()]
        env = head.group(1)
        if env in ("tabular*", "tabularx", "tabulary"):
            _, i = read_arg(text, 0)  # width
            text = text[i:]
    _, i = read_optional(text, 0)
    i = skip_ws(text, i)
    if i >= len(text) or text[i] != "{":
        raise ParseError("missing column specification")
    try:
        spec, i = read_group(text, i)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    return spec, text[i:]


def _split_rows(body: str) -> tuple[list[list[str]], list[tuple[int, str]]]:
    rows: list[list[str]] = []
    rules: list[tuple[int, str]] = []
    cells: list[str] = []
    buf: list[str] = []
    depth = 0
    env = 0
    saw_amp = False
    i = 0
    n = len(body)

    def end_row():
        nonlocal cells, buf, saw_amp
        cells.append("".join(buf))
        rows.append(cells)
        cells, buf, saw_amp = [], [], False

    while i < n:
        ch = body[i]
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced '}}' at offset {i}")
        elif ch == "\\":
            name, j = read_command(body, i)
            if depth == 0 and name in ("begin", "end"):
                env += 1 if name == "begin" else -1
            elif depth == 0 and env == 0:
                if name in ("\\", "tabularnewline"):
                    if j < n and body[j] == "*":
                        j += 1
                    _, j = read_optional(body, j)
                    end_row()
                    i = j
                    continue
                if name in RULES and not "".join(buf).strip() and not cells:
                    try:
                        if name == "cmidrule":
                            k = skip_ws(body, j)
                            if k < n and body[k] == "(":
                                j = body.index(")", k) + 1
                        _, j = read_optional(body, j)
                        for _ in range(RULES[name]):
                            _, j = read_arg(body, j)
                    except ValueError:
                        raise ParseError(f"malformed \\{name}") from None
                    rules.append((len(rows), body[i:j].strip()))
                    i = j
                    continue
            buf.append(body[i:j])
            i = j
            continue
        elif ch == "&" and depth == 0 and env == 0:
            cells.append("".join(buf))
            buf = []
            saw_amp = True
            i += 1
            continue
        buf.append(ch)
        i += 1
    if depth != 0:
        raise ParseError("unbalanced braces in tabular body")
    if env != 0:
        raise ParseError("unbalanced \\begin/\\end inside tabular body")
    if saw_amp or cells or "".join(buf).strip():
        end_row()
    return rows, rules


_SPAN = re.compile(r"\\(multicolumn|multirow)(?![A-Za-z])")


def _span_int(token: str, value: str) -> int:
    try:
        n = int(value.strip().strip("{}").strip())
    except ValueError:
        raise ParseError(f"non-integer span in {token}{{{value}}}") from None
    if n < 1:
        raise ParseError(f"span must be >= 1 in {token}{{{value}}}")
    return n


def _unwrap(cell: str, command: str) -> tuple[str, int]:
    """Remove the first ``\\multicolumn``/``\\multirow`` wrapper in ``cell``.

    Returns the cell text with the wrapper replaced by its body, and the
    span count (1 when the command is absent).
    """
    for m in _SPAN.finditer(cell):
        if m.group(1) != command:
            continue
        token = "\\" + command
        try:
            if command == "multicolumn":
                num, j = read_arg(cell, m.end())
                _, j = read_arg(cell, j)  # column spec
                body, j = read_arg(cell, j)
            else:
                _, j = read_optional(cell, m.end())  # vertical position
                num, j = read_arg(cell, j)
                _, j = read_optional(cell, j)  # bigstruts
                _, j = read_arg(cell, j)  # width, discarded
                _, j = read_optional(cell, j)  # vmove
                body, j = read_arg(cell, j)
        except ValueError:
            raise ParseError(f"malformed {token} arguments") from None
        span = _span_int(token, num)
        return cell[: m.start()] + body + cell[j:], span
    return cell, 1


def span_command_count(source: TabularSource | str) -> int:
    """Occurrences of ``\\multirow`` plus ``\\multicolumn`` in the source text."""
    raw = source.raw if isinstance(source, TabularSource) else source
    return len(_SPAN.findall(strip_comments(raw)))


def parse(source: TabularSource | str) -> TableModel:
    """Parse a (cleaned) tabular block into a :class:`TableModel`.

    Accepts the full ``\\begin{tabular}...`` block or just ``{spec} body``.
    Every grid slot ends up covered by exactly one cell: short rows are
    padded with empty cells, and source cells that fall on a slot already
    covered by a ``\\multirow`` from above are absorbed as placeholders.
    Rowspans running past the last row are clipped to the table.
    """
    raw = source.raw if isinstance(source, TabularSource) else source
    spec, body = _split_header(raw)
    n_cols = count_columns(spec)
    if n_cols < 1:
        raise ParseError(f"column specification {{{spec}}} declares no columns")
    rows, rules = _split_rows(body)
    n_rows = len(rows)
    if n_rows == 0:
        raise ParseError("tabular has no rows")

    covered: dict[tuple[int, int], int] = {}
    cells: list[Cell] = []

    def place(cell: Cell):
        for slot in cell.slots():
            covered[slot] = len(cells)
        cells.append(cell)

    for r, row in enumerate(rows):
        c = 0
        for text in row:
            text, colspan = _unwrap(text, "multicolumn")
            text, rowspan = _unwrap(text, "multirow")
            text = text.strip()
            if c + colspan > n_cols:
                raise ParseError(
                    f"row {r} needs {c + colspan} columns but the table declares {n_cols}"
                )
            if (r, c) in covered:
                # placeholder under a multirow from an earlier row
                for k in range(c, c + colspan):
                    if (r, k) not in covered:
                        place(Cell("", r, k))
                c += colspan
                continue
            width = 0
            while width < colspan and (r, c + width) not in covered:
                width += 1
            height = min(rowspan, n_rows - r)
            place(Cell(text, r, c, height, width))
            for k in range(c + width, c + colspan):
                if (r, k) not in covered:
                    place(Cell("", r, k))
            c += colspan
        for k in range(c, n_cols):
            if (r, k) not in covered:
                place(Cell("", r, k))

    cells.sort(key=lambda cell: cell.anchor)
    return TableModel(n_rows, n_cols, tuple(cells), spec, tuple(rules))


def cell_count(model: TableModel) -> int:
    """Grid-slot count, ``n_rows * n_cols``."""
    return model.n_rows * model.n_cols
