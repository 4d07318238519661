"""
Building a corpus and scoring predictions
=========================================

Write a few .tex files to a scratch directory, build a classified corpus
from them, then evaluate a prediction file per complexity bucket. Visual
metrics need a LaTeX toolchain, so this demo runs with rendering off, the
same as ``tabreward evaluate --no-render``.
"""

import json
import tempfile
from pathlib import Path

from tabreward.harness import build_corpus, evaluate, load_corpus


def grid(n_rows, n_cols, spans=0, tag="x"):
    rows = []
    for r in range(n_rows):
        cells = [f"{tag}{r}{c}" for c in range(n_cols)]
        if r < spans:
            cells = [rf"\multicolumn{{2}}{{c}}{{{tag}h{r}}}"] + cells[2:]
        rows.append(" & ".join(cells) + r" \\")
    return "\\begin{tabular}{" + "c" * n_cols + "}\n" + "\n".join(rows) + "\n\\end{tabular}\n"


work = Path(tempfile.mkdtemp(prefix="tabreward-demo-"))
src = work / "papers"
src.mkdir()

# %%
# Two small tables, one 10 x 12 table with two spans (medium), one 11 x 16
# table (complex), and a file with nothing but prose.
(src / "a.tex").write_text("Intro.\n" + grid(3, 3, tag="a") + "\ntext\n" + grid(2, 4, spans=1, tag="b"))
(src / "b.tex").write_text(grid(10, 12, spans=2, tag="m"))
(src / "c.tex").write_text(grid(11, 16, tag="c"))
(src / "prose.tex").write_text(r"\section{Related work} No tables here.")

summary = build_corpus(src, work / "corpus.jsonl")
print(json.dumps({k: summary[k] for k in ("files", "records", "warnings", "distribution")}, indent=1))

# %%
# Predictions: copy every ground truth, then damage two of them.
records = load_corpus(work / "corpus.jsonl")
preds = {r["id"]: r["gt_latex"] for r in records}
ids = [r["id"] for r in records]
preds[ids[0]] = preds[ids[0]].replace("a00", "a0O")            # a typo
preds[ids[1]] = r"\begin{tabular}{c} a & b \\ \end{tabular}"    # does not parse
with open(work / "preds.jsonl", "w") as f:
    for k, v in preds.items():
        f.write(json.dumps({"id": k, "latex": v}) + "\n")

report = evaluate(work / "preds.jsonl", work / "corpus.jsonl", render=False)
print(report.format_table())

# %%
# The unparseable prediction counts as 0 in both tree metrics, which is why
# the simple bucket sits below 1 even though only one text was changed.
for row in report.per_record:
    print(row["id"], row["bucket"], row["parse_ok"], round(row["teds"], 4), round(row["teds_structure"], 4))
