"""Chart specification parsing and chart-class rules.

The spec document is a small grammar-of-graphics subset:
``{mark, encoding: {x: {field}, y: {field}, color: {field}?}, title?}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .dataset import ColumnType, DataTable
from .errors import EncodingTypeMismatch, UnknownField, UnsupportedMark

SUPPORTED_MARKS = ("bar", "line", "point", "arc")


class ChartClass(Enum):
    BAR = "bar"
    LINE = "line"
    PIE = "pie"
    SCATTER = "scatter"
    GROUPED_BAR = "grouped_bar"
    MULTI_LINE = "multi_line"


@dataclass(frozen=True)
class Encoding:
    field: str
    type: ColumnType


@dataclass(frozen=True)
class ChartSpec:
    mark: str
    x: Encoding
    y: Encoding
    color: Encoding | None
    table: DataTable
    title: str | None = None


def _encoding(doc: dict, channel: str, table: DataTable) -> Encoding:
    enc = doc.get(channel)
    if not isinstance(enc, dict) or "field" not in enc:
        raise UnknownField(f"encoding.{channel}.field is required")
    field = enc["field"]
    return Encoding(field, table.column(field).type)


def parse_chart_spec(doc: dict, table: DataTable) -> ChartSpec:
    """Validate a chart document against the table and resolve column types."""
    mark = doc.get("mark")
    if mark not in SUPPORTED_MARKS:
        raise UnsupportedMark(f"mark {mark!r} not in {SUPPORTED_MARKS}")
    encoding = doc.get("encoding") or {}
    x = _encoding(encoding, "x", table)
    y = _encoding(encoding, "y", table)
    color = None
    if "color" in encoding and encoding["color"] is not None:
        color = _encoding(encoding, "color", table)

    if color is not None:
        if mark == "arc":
            raise EncodingTypeMismatch("arc marks do not take a color encoding")
        if color.type is not ColumnType.CATEGORICAL:
            raise EncodingTypeMismatch(f"color field {color.field!r} must be categorical")

    if mark == "arc":
        pair = {x.type, y.type}
        if pair != {ColumnType.CATEGORICAL, ColumnType.NUMERICAL}:
            raise EncodingTypeMismatch("arc marks need exactly one categorical and one numerical encoding")
    elif mark == "bar":
        if x.type not in (ColumnType.CATEGORICAL, ColumnType.TEMPORAL):
            raise EncodingTypeMismatch(f"bar x field {x.field!r} must be categorical or temporal")
        if y.type is not ColumnType.NUMERICAL:
            raise EncodingTypeMismatch(f"bar y field {y.field!r} must be numerical")
    elif mark == "line":
        if x.type not in (ColumnType.TEMPORAL, ColumnType.NUMERICAL):
            raise EncodingTypeMismatch(f"line x field {x.field!r} must be temporal or numerical")
        if y.type is not ColumnType.NUMERICAL:
            raise EncodingTypeMismatch(f"line y field {y.field!r} must be numerical")
    else:  # point
        if x.type not in (ColumnType.TEMPORAL, ColumnType.NUMERICAL):
            raise EncodingTypeMismatch(f"point x field {x.field!r} must be temporal or numerical")
        if y.type is not ColumnType.NUMERICAL:
            raise EncodingTypeMismatch(f"point y field {y.field!r} must be numerical")

    title = doc.get("title")
    return ChartSpec(mark, x, y, color, table, title)


def classify_chart(spec: ChartSpec) -> ChartClass:
    """Total, deterministic classification over valid specs."""
    if spec.mark == "arc":
        return ChartClass.PIE
    if spec.mark == "point":
        return ChartClass.SCATTER  # color only tints points; stays simple
    if spec.mark == "bar":
        return ChartClass.GROUPED_BAR if spec.color else ChartClass.BAR
    return ChartClass.MULTI_LINE if spec.color else ChartClass.LINE


def is_complex(chart_class: ChartClass) -> bool:
    return chart_class in (ChartClass.GROUPED_BAR, ChartClass.MULTI_LINE)


def slice_field(spec: ChartSpec) -> Encoding:
    """Categorical side of a pie spec (slice identity)."""
    return spec.x if spec.x.type is ColumnType.CATEGORICAL else spec.y


def measure_encoding(spec: ChartSpec) -> Encoding:
    """Numerical encoding summarized by facts."""
    if spec.mark == "arc":
        return spec.y if spec.y.type is ColumnType.NUMERICAL else spec.x
    return spec.y


def breakdown_encoding(spec: ChartSpec) -> Encoding:
    """Independent encoding that partitions the data (x, or slice identity)."""
    if spec.mark == "arc":
        return slice_field(spec)
    return spec.x
