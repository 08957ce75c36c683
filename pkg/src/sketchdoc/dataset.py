"""Typed in-memory data table with column-type inference.

Columns are temporal, categorical, or numerical; cells may be missing
(stored as ``None``). Rows keep a stable id equal to their input order,
which every downstream module uses to address data items.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Sequence

from .errors import AllMissing, EmptyInput, RaggedRecords, UnknownField

#: cell payload: None (missing), float (numerical), int year or date (temporal), str (categorical)
Cell = Any

MISSING_MARKERS = {"", "na", "n/a", "null", "none", "nan"}

_YEAR_RE = re.compile(r"[12]\d{3}")
_ISO_DATE_RE = re.compile(r"\d{4}-\d{2}-\d{2}")
_NAME_HINTS = ("year", "date", "time", "month", "day", "week", "quarter")

#: share of non-missing values that must parse for a type to win
PARSE_THRESHOLD = 0.9


class ColumnType(Enum):
    TEMPORAL = "temporal"
    CATEGORICAL = "categorical"
    NUMERICAL = "numerical"


def is_missing(raw: Any) -> bool:
    if raw is None:
        return True
    if isinstance(raw, float) and math.isnan(raw):
        return True
    if isinstance(raw, str) and raw.strip().lower() in MISSING_MARKERS:
        return True
    return False


def _parse_year(text: str) -> int | None:
    return int(text) if _YEAR_RE.fullmatch(text) else None


def _parse_iso_date(text: str) -> _dt.date | None:
    if not _ISO_DATE_RE.fullmatch(text):
        return None
    try:
        return _dt.date.fromisoformat(text)
    except ValueError:
        return None


def _parse_real(text: str) -> float | None:
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def _as_text(raw: Any) -> str:
    if isinstance(raw, bool):
        return str(raw)
    if isinstance(raw, float) and raw.is_integer():
        return str(int(raw))
    return str(raw).strip()


def infer_column_type(name: str, raw_values: Sequence[Any]) -> ColumnType:
    """Infer the column type from raw (string-ish) values.

    Temporal wins when at least 90% of non-missing values parse as ISO
    dates or 4-digit years AND either the column name hints at time or
    the values themselves are full ISO dates; otherwise numerical wins at
    the same threshold; everything else is categorical.
    """
    texts = [_as_text(v) for v in raw_values if not is_missing(v)]
    if not texts:
        raise AllMissing(f"column {name!r} has no non-missing values")
    n = len(texts)
    temporal_hits = sum(1 for t in texts if _parse_year(t) is not None or _parse_iso_date(t) is not None)
    iso_hits = sum(1 for t in texts if _parse_iso_date(t) is not None)
    real_hits = sum(1 for t in texts if _parse_real(t) is not None)
    name_hint = any(h in name.lower() for h in _NAME_HINTS)
    if temporal_hits / n >= PARSE_THRESHOLD and (name_hint or iso_hits / n >= PARSE_THRESHOLD):
        return ColumnType.TEMPORAL
    if real_hits / n >= PARSE_THRESHOLD:
        return ColumnType.NUMERICAL
    return ColumnType.CATEGORICAL


def _coerce(raw: Any, ctype: ColumnType) -> Cell:
    if is_missing(raw):
        return None
    text = _as_text(raw)
    if ctype is ColumnType.TEMPORAL:
        year = _parse_year(text)
        if year is not None:
            return year
        return _parse_iso_date(text)
    if ctype is ColumnType.NUMERICAL:
        return _parse_real(text)
    return text


@dataclass(frozen=True)
class Column:
    name: str
    type: ColumnType
    values: tuple[Cell, ...]


@dataclass(frozen=True)
class DataTable:
    columns: tuple[Column, ...]

    @property
    def row_count(self) -> int:
        return len(self.columns[0].values) if self.columns else 0

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def column(self, name: str) -> Column:
        for col in self.columns:
            if col.name == name:
                return col
        raise UnknownField(f"no column named {name!r}")

    def value(self, name: str, row_id: int) -> Cell:
        return self.column(name).values[row_id]

    def row(self, row_id: int) -> dict[str, Cell]:
        return {c.name: c.values[row_id] for c in self.columns}

    def to_dict(self) -> dict:
        return {
            "rowCount": self.row_count,
            "columns": [
                {
                    "name": c.name,
                    "type": c.type.value,
                    "values": [cell_to_json(v) for v in c.values],
                }
                for c in self.columns
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DataTable":
        cols = []
        for c in doc["columns"]:
            ctype = ColumnType(c["type"])
            cols.append(Column(c["name"], ctype, tuple(_cell_from_json(v, ctype) for v in c["values"])))
        return cls(tuple(cols))


def cell_to_json(cell: Cell) -> Any:
    if isinstance(cell, _dt.date):
        return cell.isoformat()
    return cell


def _cell_from_json(value: Any, ctype: ColumnType) -> Cell:
    if value is None:
        return None
    if ctype is ColumnType.TEMPORAL and isinstance(value, str):
        return _dt.date.fromisoformat(value)
    if ctype is ColumnType.NUMERICAL:
        return float(value)
    return value


def load_table(records: Sequence[dict]) -> DataTable:
    """Build a table from row-oriented records; rowIds follow input order."""
    if not records:
        raise EmptyInput("no records")
    keys = list(records[0].keys())
    key_set = set(keys)
    for i, rec in enumerate(records):
        if set(rec.keys()) != key_set:
            raise RaggedRecords(f"record {i} keys {sorted(rec.keys())} != {sorted(key_set)}")
    columns = []
    for key in keys:
        raw = [rec[key] for rec in records]
        ctype = infer_column_type(key, raw)
        columns.append(Column(key, ctype, tuple(_coerce(v, ctype) for v in raw)))
    return DataTable(tuple(columns))


def load_csv(text: str) -> DataTable:
    reader = csv.DictReader(io.StringIO(text))
    return load_table([dict(r) for r in reader])


def load_json_records(text: str) -> DataTable:
    doc = json.loads(text)
    if isinstance(doc, dict) and "values" in doc:
        doc = doc["values"]
    if not isinstance(doc, list):
        raise EmptyInput("expected a JSON array of records")
    return load_table(doc)


def read_table(path: str) -> DataTable:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if path.lower().endswith(".csv"):
        return load_csv(text)
    return load_json_records(text)


def temporal_number(cell: Cell) -> float:
    """Numeric position of a temporal cell (year as-is, dates by ordinal)."""
    if isinstance(cell, _dt.date):
        return float(cell.toordinal())
    return float(cell)


def axis_number(cell: Cell, ctype: ColumnType) -> float:
    return temporal_number(cell) if ctype is ColumnType.TEMPORAL else float(cell)


def cell_label(cell: Cell, ctype: ColumnType) -> str:
    """Human-readable form of a cell, used in sentences and axis labels."""
    if cell is None:
        return "?"
    if isinstance(cell, _dt.date):
        return cell.isoformat()
    if ctype is ColumnType.NUMERICAL:
        return format_number(float(cell))
    return str(cell)


def format_number(value: float) -> str:
    """Trimmed 2-decimal formatting: 80 -> '80', 50.50 -> '50.5'."""
    text = f"{value:.2f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text
