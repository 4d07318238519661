"""Evaluation metrics and reward signals for table-image-to-LaTeX models."""

from .cwssim import cw_ssim, haar_decompose, preprocess_pair, subband_ssim
from .latex import ParseError, TableModel, TabularSource, classify_complexity, clean, extract_tabulars, parse
from .structure import StructNode, StructTree, node_count, serialize_html, to_latex, to_structure_tree
from .ted import teds, teds_structure, tree_edit_distance

__version__ = "0.1.0"

__all__ = [
    "ParseError",
    "StructNode",
    "StructTree",
    "TableModel",
    "TabularSource",
    "classify_complexity",
    "clean",
    "cw_ssim",
    "extract_tabulars",
    "haar_decompose",
    "node_count",
    "parse",
    "preprocess_pair",
    "serialize_html",
    "subband_ssim",
    "teds",
    "teds_structure",
    "to_latex",
    "to_structure_tree",
    "tree_edit_distance",
]
