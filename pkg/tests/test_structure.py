import random
from html.parser import HTMLParser

import pytest

from helpers import random_model, random_struct_tree
from tabreward.latex import parse
from tabreward.structure import StructNode, StructTree, node_count, serialize_html, to_structure_tree


class MiniTableReader(HTMLParser):
    """Test-only reader turning our HTML back into a StructTree."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.rows = []
        self.td = None

    def handle_starttag(self, tag, attrs):
        if tag == "tr":
            self.rows.append([])
        elif tag == "td":
            a = dict(attrs)
            self.td = [int(a.get("colspan", 1)), int(a.get("rowspan", 1)), ""]

    def handle_data(self, data):
        if self.td is not None:
            self.td[2] += data

    def handle_endtag(self, tag):
        if tag == "td":
            cs, rs, text = self.td
            self.rows[-1].append(StructNode("td", cs, rs, text))
            self.td = None

    def tree(self):
        return StructTree(StructNode("table", children=tuple(StructNode("tr", children=tuple(r)) for r in self.rows)))


def read_html(text):
    reader = MiniTableReader()
    reader.feed(text)
    return reader.tree()


def test_unit_grid_tree():
    t = to_structure_tree(parse(r"{cc} 1 & 2 \\ 3 & 4 \\"))
    assert node_count(t) == 7
    assert [len(tr.children) for tr in t.root.children] == [2, 2]


def test_multicolumn_header_tree():
    t = to_structure_tree(parse(r"{cc} \multicolumn{2}{c}{h} \\ 1 & 2 \\"))
    expected = StructTree(StructNode("table", children=(
        StructNode("tr", children=(StructNode("td", 2, 1, "h"),)),
        StructNode("tr", children=(StructNode("td", 1, 1, "1"), StructNode("td", 1, 1, "2"))),
    )))
    assert t == expected
    assert node_count(t) == 6


def test_rowspan_tree():
    t = to_structure_tree(parse(r"{cc} \multirow{2}{*}{A} & b \\ & c \\"))
    expected = StructTree(StructNode("table", children=(
        StructNode("tr", children=(StructNode("td", 1, 2, "A"), StructNode("td", 1, 1, "b"))),
        StructNode("tr", children=(StructNode("td", 1, 1, "c"),)),
    )))
    assert t == expected


def test_node_count_single_cell():
    assert node_count(to_structure_tree(parse(r"{c} x \\"))) == 3


def test_whitespace_normalized():
    t = to_structure_tree(parse("{c}   a \n   b  \\\\"))
    assert t.root.children[0].children[0].text == "a b"


@pytest.mark.parametrize("src, html", [
    (r"{c} x \\", "<table><tr><td>x</td></tr></table>"),
    (r"{cc} \multicolumn{2}{c}{} \\", '<table><tr><td colspan="2"></td></tr></table>'),
    (r"{c} a&b \\".replace("&", r"\&"), r"<table><tr><td>a\&amp;b</td></tr></table>"),
])
def test_serialize_html(src, html):
    assert serialize_html(to_structure_tree(parse(src))) == html


def test_serialize_attribute_order_and_escaping():
    tree = StructTree(StructNode("table", children=(
        StructNode("tr", children=(StructNode("td", 2, 3, "a&b<c>"),)),
    )))
    assert serialize_html(tree) == '<table><tr><td colspan="2" rowspan="3">a&amp;b&lt;c&gt;</td></tr></table>'


def test_tree_invariants_enforced():
    with pytest.raises(ValueError):
        StructTree(StructNode("tr"))
    with pytest.raises(ValueError):
        StructNode("th")


def test_node_count_formula_and_determinism():
    rng = random.Random(3)
    for _ in range(200):
        m = random_model(rng)
        t = to_structure_tree(m)
        assert node_count(t) == 1 + m.n_rows + len(m.cells)
        assert serialize_html(to_structure_tree(m)) == serialize_html(t)


def test_html_round_trip_is_injective():
    rng = random.Random(5)
    seen = {}
    texts = ("", "a", "a&b", "<x>", "ab")
    for _ in range(500):
        t = random_struct_tree(rng, max_nodes=7, texts=texts)
        t = StructTree(StructNode("table", children=tuple(
            StructNode("tr", children=tuple(StructNode("td", td.colspan, td.rowspan, td.text) for td in tr.children))
            for tr in t.root.children
        )))
        html = serialize_html(t)
        assert read_html(html) == t
        assert seen.setdefault(html, t) == t
