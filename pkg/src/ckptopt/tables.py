"""Machine-readable result tables (CSV and JSON renderings).

Cell values serialize losslessly: floats are written in their shortest
round-tripping decimal form, so parsing an emitted CSV table and
re-serializing it reproduces the bytes exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import DomainError

__all__ = ["Cell", "OutputTable", "parse_csv_table"]

Cell = Union[float, int, str, None]

_HEADER_RE = re.compile(r"^(.*) \((.*)\)$")
_INT_RE = re.compile(r"^[+-]?\d+$")


def _cell_to_text(cell: Cell) -> str:
    if cell is None:
        return ""
    if isinstance(cell, str):
        return cell
    return repr(cell)


def _text_to_cell(text: str) -> Cell:
    if text == "":
        return None
    if _INT_RE.match(text):
        return int(text)
    try:
        value = float(text)
    except ValueError:
        return text
    # Emitted numeric cells are always finite; words like "inf" or "nan"
    # that float() would accept are labels, not numbers.
    return value if math.isfinite(value) else text


@dataclass(frozen=True)
class OutputTable:
    """Ordered columns (name, unit) over rows of cells.

    The unit is the empty string for dimensionless or textual columns.  Row
    arity must match the column count.
    """

    columns: tuple[tuple[str, str], ...]
    rows: tuple[tuple[Cell, ...], ...]

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != len(self.columns):
                raise DomainError(
                    f"row arity {len(row)} does not match column count {len(self.columns)}"
                )

    def header_cells(self) -> list[str]:
        return [name if not unit else f"{name} ({unit})" for name, unit in self.columns]

    def to_csv(self) -> str:
        """Header row plus one line per data row, LF-terminated."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.header_cells())
        for row in self.rows:
            writer.writerow([_cell_to_text(cell) for cell in row])
        return buffer.getvalue()

    def to_json(self) -> str:
        """Flat array of row objects keyed by column name."""
        names = [name for name, _ in self.columns]
        return json.dumps([dict(zip(names, row)) for row in self.rows], indent=2) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise DomainError(f"unknown table format {fmt!r}; expected csv or json")


def parse_csv_table(text: str) -> OutputTable:
    """Inverse of :meth:`OutputTable.to_csv`."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DomainError("empty CSV table") from None
    columns = []
    for cell in header:
        match = _HEADER_RE.match(cell)
        if match:
            columns.append((match.group(1), match.group(2)))
        else:
            columns.append((cell, ""))
    rows = tuple(tuple(_text_to_cell(cell) for cell in row) for row in reader)
    return OutputTable(tuple(columns), rows)
