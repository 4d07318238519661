import itertools
import math
import random

import pytest

from helpers import Node, brute_force_ted, random_generic_tree, random_struct_tree
from tabreward.latex import parse
from tabreward.structure import StructNode, StructTree, node_count, to_structure_tree
from tabreward.ted import (
    STRUCTURE_ONLY,
    STRUCTURE_PLUS_CONTENT,
    levenshtein,
    normalized_edit_distance,
    ted_result,
    teds,
    teds_structure,
    tree_edit_distance,
    zhang_shasha,
)

GRID = to_structure_tree(parse(r"{cc} 1 & 2 \\ 3 & 4 \\"))
MISSING_TD = StructTree(StructNode("table", children=(
    GRID.root.children[0],
    StructNode("tr", children=GRID.root.children[1].children[:1]),
)))
SINGLE = to_structure_tree(parse(r"{c} x \\"))


def label_cost(a, b):
    return 0.0 if a.label == b.label else 1.0


def test_levenshtein():
    assert levenshtein("kitten", "sitting") == 3
    assert levenshtein("", "abc") == 3
    assert normalized_edit_distance("ab", "ad") == 0.5
    assert normalized_edit_distance("", "") == 0.0


def test_identical_zero():
    assert tree_edit_distance(GRID, GRID) == 0
    assert tree_edit_distance(GRID, GRID, STRUCTURE_PLUS_CONTENT) == 0


def test_single_deletion():
    assert tree_edit_distance(GRID, MISSING_TD) == 1
    assert brute_force_ted(GRID, MISSING_TD, STRUCTURE_ONLY.substitute) == 1


def test_teds_structure_examples():
    assert teds_structure(GRID, GRID) == 1.0
    assert teds_structure(MISSING_TD, GRID) == pytest.approx(1 - 1 / 7, abs=1e-12)
    # single cell vs 2x2: brute-force oracle gives distance 4 -> 1 - 4/7
    d = brute_force_ted(SINGLE, GRID, STRUCTURE_ONLY.substitute)
    assert d == 4
    assert teds_structure(SINGLE, GRID) == pytest.approx(1 - d / 7, abs=1e-12)


def test_teds_content_example():
    a = to_structure_tree(parse(r"{c} ab \\"))
    b = to_structure_tree(parse(r"{c} ad \\"))
    assert brute_force_ted(a, b, STRUCTURE_PLUS_CONTENT.substitute) == 0.5
    assert teds(a, b) == pytest.approx(1 - 0.5 / 3, abs=1e-12)
    assert teds_structure(a, b) == 1.0


def test_ted_result_fields():
    r = ted_result(MISSING_TD, GRID)
    assert (r.distance, r.pred_size, r.gt_size) == (1, 6, 7)
    assert r.similarity == pytest.approx(6 / 7)


def test_span_mismatch_is_full_substitution():
    a = StructNode("td", 2, 1, "x")
    b = StructNode("td", 1, 1, "x")
    assert STRUCTURE_PLUS_CONTENT.substitute(a, b) == 1.0
    assert STRUCTURE_ONLY.substitute(a, b) == 1.0


def test_zhang_shasha_classic_example():
    # f(d(a, c(b)), e) vs f(c(d(a, b)), e): distance 2 (Zhang & Shasha's worked example)
    t1 = Node("f", Node("d", Node("a"), Node("c", Node("b"))), Node("e"))
    t2 = Node("f", Node("c", Node("d", Node("a"), Node("b"))), Node("e"))
    assert zhang_shasha(t1, t2, label_cost) == 2
    assert brute_force_ted(t1, t2, label_cost) == 2


def test_generic_trees_match_oracle():
    rng = random.Random(17)
    for _ in range(150):
        a, b = random_generic_tree(rng), random_generic_tree(rng)
        assert zhang_shasha(a, b, label_cost) == brute_force_ted(a, b, label_cost), (a, b)


def test_struct_trees_match_oracle_both_modes():
    rng = random.Random(23)
    for _ in range(150):
        a, b = random_struct_tree(rng), random_struct_tree(rng)
        assert tree_edit_distance(a, b) == brute_force_ted(a, b, STRUCTURE_ONLY.substitute)
        got = tree_edit_distance(a, b, STRUCTURE_PLUS_CONTENT)
        want = brute_force_ted(a, b, STRUCTURE_PLUS_CONTENT.substitute)
        assert math.isclose(got, want, abs_tol=1e-12)


def test_metric_properties():
    rng = random.Random(29)
    trees = [random_struct_tree(rng, max_nodes=8) for _ in range(25)]
    for a in trees:
        assert tree_edit_distance(a, a) == 0
    for a, b in itertools.combinations(trees, 2):
        d = tree_edit_distance(a, b)
        assert d == tree_edit_distance(b, a)
        assert d <= node_count(a) + node_count(b)
        ts, t = teds_structure(a, b), teds(a, b)
        assert 0.0 <= t <= ts <= 1.0
        assert (ts == 1.0) == (d == 0)
    for a, b, c in itertools.islice(itertools.permutations(trees, 3), 2000):
        assert tree_edit_distance(a, c) <= tree_edit_distance(a, b) + tree_edit_distance(b, c)


def test_larger_tables_run():
    row = " & ".join(str(k) for k in range(12))
    big = to_structure_tree(parse("{" + "c" * 12 + "}" + " \\\\ ".join([row] * 15) + " \\\\"))
    smaller = to_structure_tree(parse("{" + "c" * 12 + "}" + " \\\\ ".join([row] * 14) + " \\\\"))
    assert node_count(big) == 1 + 15 + 180
    # one tr and its 12 tds deleted
    assert tree_edit_distance(big, smaller) == 13
    assert teds_structure(smaller, big) == pytest.approx(1 - 13 / 196)
