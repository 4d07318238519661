from .clean import DEFAULT_STRIP, StripRule, clean, clean_text, load_strip_list, parse_strip_list
from .complexity import Buckets, ComplexityClass, DEFAULT_BUCKETS, classify_complexity
from .extract import ExtractWarning, TabularSource, extract_tabulars
from .parse import Cell, ParseError, TableModel, cell_count, count_columns, parse, span_command_count

__all__ = [
    "Buckets",
    "Cell",
    "ComplexityClass",
    "DEFAULT_BUCKETS",
    "DEFAULT_STRIP",
    "ExtractWarning",
    "ParseError",
    "StripRule",
    "TableModel",
    "TabularSource",
    "cell_count",
    "classify_complexity",
    "clean",
    "clean_text",
    "count_columns",
    "extract_tabulars",
    "load_strip_list",
    "parse",
    "parse_strip_list",
    "span_command_count",
]
