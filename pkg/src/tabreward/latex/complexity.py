"""Simple / medium / complex bucketing of parsed tables."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .parse import TableModel, cell_count


class ComplexityClass(str, enum.Enum):
    SIMPLE = "simple"
    MEDIUM = "medium"
    COMPLEX = "complex"


@dataclass(frozen=True)
class Buckets:
    """Thresholds for :func:`classify_complexity`.

    Complex: more than ``complex_above`` cells, regardless of spans.
    Medium: ``medium_min <= cells <= medium_max`` and at least
    ``min_span_commands`` multirow/multicolumn commands.
    """

    medium_min: int = 100
    medium_max: int = 160
    complex_above: int = 160
    min_span_commands: int = 2

    @classmethod
    def parse(cls, text: str) -> "Buckets":
        """Parse ``MEDIUM_MIN:MEDIUM_MAX:MIN_SPANS`` (complex starts above MEDIUM_MAX)."""
        try:
            lo, hi, spans = (int(part) for part in text.split(":"))
        except ValueError:
            raise ValueError(f"bucket spec must look like 100:160:2, got {text!r}") from None
        if not 0 <= lo <= hi or spans < 0:
            raise ValueError(f"inconsistent bucket spec {text!r}")
        return cls(lo, hi, hi, spans)


DEFAULT_BUCKETS = Buckets()


def classify_cells(cells: int, span_commands: int, buckets: Buckets = DEFAULT_BUCKETS) -> ComplexityClass:
    if cells > buckets.complex_above:
        return ComplexityClass.COMPLEX
    if span_commands >= buckets.min_span_commands and buckets.medium_min <= cells <= buckets.medium_max:
        return ComplexityClass.MEDIUM
    return ComplexityClass.SIMPLE


def classify_complexity(
    model: TableModel | int, span_command_count: int, buckets: Buckets = DEFAULT_BUCKETS
) -> ComplexityClass:
    """Bucket a table by grid size and number of span commands.

    ``model`` may be a parsed table or a precomputed cell count.
    """
    cells = model if isinstance(model, int) else cell_count(model)
    return classify_cells(cells, span_command_count, buckets)
