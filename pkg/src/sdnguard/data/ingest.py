"""CSV ingestion for flow-record tables (RFC 4180 with header row)."""

import csv
from dataclasses import dataclass

from ..errors import DataError


@dataclass
class RawTable:
    column_names: list[str]
    rows: list[list[str]]

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.column_names)

    def column_index(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise DataError(f"column {name!r} not in table") from None


def load_csv(path, strip_names: bool = True) -> RawTable:
    """Read a headered CSV into a RawTable, preserving column order.

    Rows whose cell count disagrees with the header raise DataError with the
    offending 1-based line number. Column names are whitespace-stripped by
    default (flow exporters are inconsistent about leading spaces).
    """
    rows: list[list[str]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if strip_names:
            header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            raise DataError(f"{path}: duplicate column names in header")
        n_cols = len(header)
        for row in reader:
            if not row:
                continue
            if len(row) != n_cols:
                raise DataError(
                    f"{path}: line {reader.line_num}: expected {n_cols} cells, "
                    f"got {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return RawTable(column_names=header, rows=rows)
