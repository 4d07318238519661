"""HTML-style ``table/tr/td`` trees built from parsed tables.

These trees are the operands of the TEDS metrics. Cell text is stored on the
``td`` node itself (not as a child text node), so a tree has the same node
count whether or not content is compared.
"""

from __future__ import annotations

import html
from dataclasses import dataclass, field

from .latex.parse import TableModel, count_columns

TAGS = ("table", "tr", "td")


@dataclass(frozen=True)
class StructNode:
    tag: str
    colspan: int = 1
    rowspan: int = 1
    text: str | None = None
    children: tuple["StructNode", ...] = field(default=())

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag!r}")
        if self.colspan < 1 or self.rowspan < 1:
            raise ValueError("spans must be >= 1")


@dataclass(frozen=True)
class StructTree:
    root: StructNode

    def __post_init__(self):
        if self.root.tag != "table":
            raise ValueError("root must be a table node")
        for tr in self.root.children:
            if tr.tag != "tr":
                raise ValueError("table children must be tr nodes")
            for td in tr.children:
                if td.tag != "td" or td.children:
                    raise ValueError("tr children must be leaf td nodes")


def normalize_text(text: str) -> str:
    return " ".join(text.split())


def to_structure_tree(model: TableModel) -> StructTree:
    """One ``tr`` per grid row, one ``td`` per cell anchored in that row.

    Slots covered by a span from elsewhere produce no node, as in HTML.
    """
    rows: list[list[StructNode]] = [[] for _ in range(model.n_rows)]
    for cell in sorted(model.cells, key=lambda c: c.anchor):
        rows[cell.row].append(
            StructNode("td", cell.colspan, cell.rowspan, normalize_text(cell.content))
        )
    trs = tuple(StructNode("tr", children=tuple(tds)) for tds in rows)
    return StructTree(StructNode("table", children=trs))


def iter_nodes(node: StructNode | StructTree):
    if isinstance(node, StructTree):
        node = node.root
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(n.children))


def node_count(tree: StructTree | StructNode) -> int:
    return sum(1 for _ in iter_nodes(tree))


def serialize_html(tree: StructTree) -> str:
    """Deterministic, whitespace-free HTML for a structure tree."""
    out = ["<table>"]
    for tr in tree.root.children:
        out.append("<tr>")
        for td in tr.children:
            attrs = ""
            if td.colspan != 1:
                attrs += f' colspan="{td.colspan}"'
            if td.rowspan != 1:
                attrs += f' rowspan="{td.rowspan}"'
            out.append(f"<td{attrs}>{html.escape(td.text or '', quote=False)}</td>")
        out.append("</tr>")
    out.append("</table>")
    return "".join(out)


def to_latex(model: TableModel) -> str:
    """Canonical tabular source for a model.

    Spans are written as ``\\multicolumn{n}{c}{..}`` / ``\\multirow{n}{*}{..}``
    with explicit empty placeholders under multirows, so parsing the output
    gives back an equal model.
    """
    spec = model.column_spec if count_columns(model.column_spec) == model.n_cols else "c" * model.n_cols
    owner = model.grid()
    rules_at: dict[int, list[str]] = {}
    for pos, rule in model.rules:
        rules_at.setdefault(pos, []).append(rule)

    lines = [f"\\begin{{tabular}}{{{spec}}}"]
    for r in range(model.n_rows):
        lines.extend(rules_at.get(r, []))
        parts = []
        c = 0
        while c < model.n_cols:
            cell = model.cells[owner[r][c]]
            if cell.row == r:
                body = cell.content
                if cell.rowspan > 1:
                    body = f"\\multirow{{{cell.rowspan}}}{{*}}{{{body}}}"
            else:
                body = ""
            if cell.colspan > 1 and c == cell.col:
                body = f"\\multicolumn{{{cell.colspan}}}{{c}}{{{body}}}"
                c += cell.colspan
            else:
                c += 1
            parts.append(body)
        lines.append(" & ".join(parts) + " \\\\")
    lines.extend(rules_at.get(model.n_rows, []))
    lines.append("\\end{tabular}")
    return "\n".join(lines)
