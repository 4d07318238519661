"""Random generators and independent oracles shared by the test modules."""

import string
import sys
from pathlib import Path

import numpy as np

from tabreward.grpo import Batch, HyperParams, ToyPolicy, advantages
from tabreward.latex import Cell, TableModel
from tabreward.render import RenderConfig
from tabreward.structure import StructNode, StructTree

FAKETEX = str(Path(__file__).with_name("faketex.py"))


def fake_render_config(**overrides) -> RenderConfig:
    params = dict(
        compiler=(sys.executable, FAKETEX, "compile", "{tex}"),
        rasterizer=(sys.executable, FAKETEX, "raster", "{pdf}", "{stem}"),
        timeout=20.0,
        parallelism=4,
    )
    params.update(overrides)
    return RenderConfig(**params)


def random_text(rng, max_len=4):
    n = rng.randint(0, max_len)
    return "".join(rng.choice(string.ascii_lowercase + string.digits) for _ in range(n))


def random_model(rng, max_rows=6, max_cols=6, span_prob=0.3) -> TableModel:
    """Random full-coverage layout: greedily tile the grid with rectangles."""
    n_rows = rng.randint(1, max_rows)
    n_cols = rng.randint(1, max_cols)
    covered = set()
    cells = []
    for r in range(n_rows):
        for c in range(n_cols):
            if (r, c) in covered:
                continue
            run = 0
            while c + run < n_cols and (r, c + run) not in covered:
                run += 1
            colspan = rng.randint(1, run) if rng.random() < span_prob else 1
            rowspan = rng.randint(1, n_rows - r) if rng.random() < span_prob else 1
            cell = Cell(random_text(rng), r, c, rowspan, colspan)
            covered.update(cell.slots())
            cells.append(cell)
    return TableModel(n_rows, n_cols, tuple(cells), "c" * n_cols)


def layout_latex(model: TableModel, rng) -> tuple[str, bool]:
    """Hand-rolled LaTeX for a layout with random ragged rows and rules.

    Written independently of ``structure.to_latex``. Returns the source and
    whether every cell's text survives (ragged rows only drop empty cells).
    """
    owner = {}
    for cell in model.cells:
        for slot in cell.slots():
            owner[slot] = cell
    lines = [f"\\begin{{tabular}}{{{'|'.join('lcr'[k % 3] for k in range(model.n_cols))}}}"]
    if rng.random() < 0.5:
        lines.append("\\hline")
    for r in range(model.n_rows):
        parts = []
        c = 0
        while c < model.n_cols:
            cell = owner[(r, c)]
            if cell.row == r:
                body = cell.content
                if cell.rowspan > 1:
                    body = f"\\multirow{{{cell.rowspan}}}{{*}}{{{body}}}"
            else:
                body = ""
            if cell.colspan > 1:
                body = f"\\multicolumn{{{cell.colspan}}}{{|c|}}{{{body}}}"
            parts.append(body)
            c += cell.colspan
        # ragged: drop trailing plain empty cells some of the time
        while parts and parts[-1] == "" and rng.random() < 0.5:
            parts.pop()
        sep = rng.choice([" & ", "&", " &\n  "])
        lines.append(sep.join(parts) + rng.choice([" \\\\", "\\\\[2pt]", " \\\\ \\hline"]))
    lines.append("\\end{tabular}")
    return "\n".join(lines), True


def random_struct_tree(rng, max_nodes=6, texts=("", "a", "ab", "b", "ba")) -> StructTree:
    budget = rng.randint(2, max_nodes) - 1  # nodes below the root
    trs = []
    while budget > 0:
        budget -= 1
        tds = []
        k = rng.randint(0, budget)
        for _ in range(k):
            tds.append(StructNode("td", rng.choice([1, 1, 2]), rng.choice([1, 1, 2]), rng.choice(texts)))
        budget -= k
        trs.append(StructNode("tr", children=tuple(tds)))
    return StructTree(StructNode("table", children=tuple(trs)))


class Node:
    """Generic labelled ordered tree for exercising the edit distance."""

    def __init__(self, label, *children):
        self.label = label
        self.children = list(children)

    def __repr__(self):
        return f"{self.label}({','.join(map(repr, self.children))})" if self.children else self.label


def random_generic_tree(rng, max_nodes=6, labels="abc") -> Node:
    n = rng.randint(1, max_nodes)
    nodes = [Node(rng.choice(labels))]
    for _ in range(n - 1):
        parent = rng.choice(nodes)
        child = Node(rng.choice(labels))
        parent.children.insert(rng.randint(0, len(parent.children)), child)
        nodes.append(child)
    return nodes[0]


def _flatten(root):
    """Preorder list of (node, set of ancestor indices)."""
    out = []

    def visit(node, ancestors):
        idx = len(out)
        out.append((node, ancestors))
        for ch in node.children:
            visit(ch, ancestors | {idx})

    visit(root, frozenset())
    return out


def brute_force_ted(a, b, substitute, delete=1.0, insert=1.0) -> float:
    """Minimum edit cost by enumerating every valid (Tai) mapping.

    A mapping is a partial one-to-one node matching that preserves both
    ancestry and left-to-right (preorder) order; the cost of the edit
    script it induces is the sum of substitution costs of matched pairs
    plus one delete / insert per unmatched node.
    """
    a = getattr(a, "root", a)
    b = getattr(b, "root", b)
    A, B = _flatten(a), _flatten(b)
    best = [float("inf")]

    def compatible(i, j, pairs):
        for i2, j2 in pairs:
            if j2 == j:
                return False
            if (i2 in A[i][1]) != (j2 in B[j][1]):
                return False
            if (i2 < i) != (j2 < j):
                return False
        return True

    def search(i, pairs, cost):
        if cost >= best[0]:
            return
        if i == len(A):
            total = cost + (len(B) - len(pairs)) * insert
            best[0] = min(best[0], total)
            return
        search(i + 1, pairs, cost + delete)
        for j in range(len(B)):
            if compatible(i, j, pairs):
                pairs.append((i, j))
                search(i + 1, pairs, cost + substitute(A[i][0], B[j][0]))
                pairs.pop()

    search(0, [], 0.0)
    return best[0]


def random_instance(rng, n=4, length=3, vocab=4, beta=0.02, margin=1e-3):
    """Toy instance whose ratios are all at least ``margin`` away from the clip edges."""
    hp = HyperParams(0.2, beta)
    while True:
        policy = ToyPolicy.random(length, vocab, rng)
        tokens = policy.sample(n, rng)
        cur = policy.sequence_logprob(tokens)
        old = cur + rng.normal(0, 0.3, n)
        ref = cur + rng.normal(0, 0.5, n)
        ratio = np.exp(cur - old)
        if np.min(np.abs(ratio - 0.8)) > margin and np.min(np.abs(ratio - 1.2)) > margin:
            adv = advantages(rng.integers(0, 3, n))
            return policy, Batch(tokens, old, ref, adv), hp


def rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)
