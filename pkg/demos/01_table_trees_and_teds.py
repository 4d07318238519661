"""
From LaTeX tabular to tree edit similarity
==========================================

Walk one small table through the parsing pipeline and score a few
hand-damaged predictions against it.
"""

from tabreward.latex import clean, extract_tabulars, parse, span_command_count
from tabreward.structure import node_count, serialize_html, to_structure_tree
from tabreward.ted import teds, teds_structure, tree_edit_distance

# %%
# A fragment of a paper, with a citation and some colour inside the table.
document = r"""
Results are in Table~\ref{tab:main}.
\begin{table}[t]
\centering
\begin{tabular}{l|cc}
\toprule
\multirow{2}{*}{Model} & \multicolumn{2}{c}{Score} \\
 & dev & \textcolor{red}{test}\cite{x} \\
\midrule
base & 71.2 & 70.4 \\
ours & \textbf{74.9} & 73.8 \\
\bottomrule
\end{tabular}
\end{table}
"""

(block,) = extract_tabulars(document, origin="demo.tex")
print("found tabular at byte offset", block.offset)

cleaned = clean(block)
print(cleaned.raw)

# %%
# Parsing yields a grid model. Every slot of the 4 x 3 grid is owned by
# exactly one cell; spans are stored on the anchor cell.
model = parse(cleaned)
print(model.n_rows, "rows x", model.n_cols, "cols,", len(model.cells), "cells,",
      span_command_count(cleaned.raw), "span commands")
for row in model.grid():
    print(row)

# %%
# The structure tree is table -> tr -> td, and serializes to HTML.
gt = to_structure_tree(model)
print(node_count(gt), "nodes")
print(serialize_html(gt))

# %%
# Three predictions: a typo, a lost multicolumn, a dropped row.
predictions = {
    "typo": r"""{l|cc}
\multirow{2}{*}{Model} & \multicolumn{2}{c}{Score} \\ & dev & test \\
base & 71.2 & 70.1 \\ ours & \textbf{74.9} & 73.8 \\""",
    "no multicolumn": r"""{l|cc}
\multirow{2}{*}{Model} & Score & \\ & dev & test \\
base & 71.2 & 70.4 \\ ours & \textbf{74.9} & 73.8 \\""",
    "missing row": r"""{l|cc}
\multirow{2}{*}{Model} & \multicolumn{2}{c}{Score} \\ & dev & test \\
ours & \textbf{74.9} & 73.8 \\""",
}

print(f"{'prediction':<16}{'TED (struct)':>13}{'TEDS':>9}{'TEDS-S':>9}")
for name, latex in predictions.items():
    pred = to_structure_tree(parse(clean(latex)))
    d = tree_edit_distance(pred, gt)
    print(f"{name:<16}{d:>13g}{teds(pred, gt):>9.4f}{teds_structure(pred, gt):>9.4f}")

# %%
# A typo only moves TEDS, since TEDS-Structure ignores text. Losing a
# span relabels one td and adds another, and a dropped row removes a tr with
# its three tds.
