"""Ordered tree edit distance (Zhang-Shasha) and the TEDS similarity scores."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

from .structure import StructNode, StructTree, node_count


class Mode(str, enum.Enum):
    STRUCTURE = "structure"
    CONTENT = "content"


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def normalized_edit_distance(a: str, b: str) -> float:
    """Character edit distance divided by the longer length (0 for two empty strings)."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


@dataclass(frozen=True)
class CostModel:
    """Unit insert/delete; substitution per node label.

    Tag or span mismatch costs 1. In ``CONTENT`` mode two structurally equal
    ``td`` nodes additionally pay the normalized edit distance of their text.
    """

    mode: Mode = Mode.STRUCTURE
    insert_cost: float = 1.0
    delete_cost: float = 1.0

    def substitute(self, a: StructNode, b: StructNode) -> float:
        if a.tag != b.tag or a.colspan != b.colspan or a.rowspan != b.rowspan:
            return 1.0
        if self.mode is Mode.CONTENT and a.tag == "td":
            return normalized_edit_distance(a.text or "", b.text or "")
        return 0.0


STRUCTURE_ONLY = CostModel(Mode.STRUCTURE)
STRUCTURE_PLUS_CONTENT = CostModel(Mode.CONTENT)


def _postorder(root):
    """Postorder node list and leftmost-leaf index of each node."""
    nodes = []
    leftmost = []

    def visit(node):
        first = None
        for child in node.children:
            lm = visit(child)
            if first is None:
                first = lm
        idx = len(nodes)
        nodes.append(node)
        leftmost.append(idx if first is None else first)
        return leftmost[idx]

    visit(root)
    return nodes, leftmost


def _keyroots(leftmost):
    seen = {}
    for i, lm in enumerate(leftmost):
        seen[lm] = i  # keep the highest node for each leftmost leaf
    return sorted(seen.values())


def zhang_shasha(
    a,
    b,
    substitute: Callable[[object, object], float],
    delete: Callable[[object], float] = lambda n: 1.0,
    insert: Callable[[object], float] = lambda n: 1.0,
) -> float:
    """Edit distance between two ordered trees of objects with ``children``."""
    an, al = _postorder(a)
    bn, bl = _postorder(b)
    na, nb = len(an), len(bn)
    td = [[0.0] * nb for _ in range(na)]
    del_cost = [delete(n) for n in an]
    ins_cost = [insert(n) for n in bn]

    for i in _keyroots(al):
        li = al[i]
        for j in _keyroots(bl):
            lj = bl[j]
            m, n = i - li + 2, j - lj + 2
            fd = [[0.0] * n for _ in range(m)]
            for x in range(1, m):
                fd[x][0] = fd[x - 1][0] + del_cost[li + x - 1]
            for y in range(1, n):
                fd[0][y] = fd[0][y - 1] + ins_cost[lj + y - 1]
            for x in range(1, m):
                ii = li + x - 1
                row, prev = fd[x], fd[x - 1]
                for y in range(1, n):
                    jj = lj + y - 1
                    if al[ii] == li and bl[jj] == lj:
                        best = min(
                            prev[y] + del_cost[ii],
                            row[y - 1] + ins_cost[jj],
                            prev[y - 1] + substitute(an[ii], bn[jj]),
                        )
                        row[y] = best
                        td[ii][jj] = best
                    else:
                        row[y] = min(
                            prev[y] + del_cost[ii],
                            row[y - 1] + ins_cost[jj],
                            fd[al[ii] - li][bl[jj] - lj] + td[ii][jj],
                        )
    return td[na - 1][nb - 1]


def _root(tree):
    return tree.root if isinstance(tree, StructTree) else tree


def tree_edit_distance(a, b, cost: CostModel = STRUCTURE_ONLY) -> float:
    return zhang_shasha(
        _root(a),
        _root(b),
        cost.substitute,
        lambda n: cost.delete_cost,
        lambda n: cost.insert_cost,
    )


@dataclass(frozen=True)
class TedResult:
    distance: float
    pred_size: int
    gt_size: int

    @property
    def similarity(self) -> float:
        return 1.0 - self.distance / max(self.pred_size, self.gt_size)


def ted_result(pred, gt, cost: CostModel = STRUCTURE_ONLY) -> TedResult:
    return TedResult(tree_edit_distance(pred, gt, cost), node_count(pred), node_count(gt))


def teds_structure(pred, gt) -> float:
    """1 - TED / max(|pred|, |gt|), ignoring cell text."""
    return ted_result(pred, gt, STRUCTURE_ONLY).similarity


def teds(pred, gt) -> float:
    """Like :func:`teds_structure` but matched cells also pay for differing text."""
    return ted_result(pred, gt, STRUCTURE_PLUS_CONTENT).similarity
