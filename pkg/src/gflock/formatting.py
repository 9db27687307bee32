"""Table formatting utilities for gflock comparison output."""

import csv
import io
from typing import List, Literal, Sequence, Tuple

from .reporting import ComparisonTable

TableStyle = Literal["text", "markdown", "csv"]
TABLE_STYLES: Tuple[str, ...] = ("text", "markdown", "csv")

Row = Tuple[str, Sequence[float]]


def format_table(
    header: Sequence[str],
    rows: Sequence[Row],
    style: TableStyle = "text",
    precision: int = 4,
) -> str:
    """
    Render a metric table.

    Args:
        header: Column labels (without the row-label column)
        rows: ``(label, values)`` pairs, one value per column
        style: "text", "markdown", or "csv"
        precision: Decimals for text and markdown; csv keeps full precision

    Returns:
        The rendered table, ending with a newline

    Raises:
        ValueError: If the style is unknown or a row has the wrong width

    Examples:
        >>> print(format_table(["A"], [("Fitness", [0.5])], style="markdown"), end="")
        | Metric | A |
        |---|---|
        | Fitness | 0.5000 |
    """
    for label, values in rows:
        if len(values) != len(header):
            raise ValueError(f"row {label!r} has {len(values)} values for {len(header)} columns")

    if style == "text":
        return _text_table(header, rows, precision)
    elif style == "markdown":
        return _markdown_table(header, rows, precision)
    elif style == "csv":
        return _csv_table(header, rows)
    else:
        raise ValueError(f"Unknown table style: {style}. Use 'text', 'markdown', or 'csv'")


def _text_table(header: Sequence[str], rows: Sequence[Row], precision: int) -> str:
    cells: List[List[str]] = [["Metric", *header]]
    cells.extend([label, *(f"{v:.{precision}f}" for v in values)] for label, values in rows)
    widths = [max(len(row[i]) for row in cells) for i in range(len(cells[0]))]

    def line(row: List[str]) -> str:
        first = row[0].ljust(widths[0])
        rest = (cell.rjust(widths[i + 1]) for i, cell in enumerate(row[1:]))
        return "  ".join([first, *rest]).rstrip()

    rule = "-" * (sum(widths) + 2 * (len(widths) - 1))
    out = [line(cells[0]), rule, *(line(row) for row in cells[1:])]
    return "\n".join(out) + "\n"


def _markdown_table(header: Sequence[str], rows: Sequence[Row], precision: int) -> str:
    out = [
        "| Metric | " + " | ".join(header) + " |",
        "|" + "---|" * (len(header) + 1),
    ]
    for label, values in rows:
        out.append(f"| {label} | " + " | ".join(f"{v:.{precision}f}" for v in values) + " |")
    return "\n".join(out) + "\n"


def _csv_table(header: Sequence[str], rows: Sequence[Row]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["metric", *header])
    for label, values in rows:
        writer.writerow([label, *(repr(float(v)) for v in values)])
    return buffer.getvalue()


def format_comparison(table: ComparisonTable, style: TableStyle = "text") -> str:
    """Render a ComparisonTable in the given style."""
    return format_table(table.column_labels(), table.rows(), style=style)


__all__ = ["TABLE_STYLES", "TableStyle", "format_comparison", "format_table"]
