"""Intent inference: map a selection to the fact queries worth computing.

Fact types are eliminated by column type, focus size, and sketch kind;
special cases cover single items on grouped charts (three comparison
scopes) and multi-item lassos (the selection becomes its own dataset).
Declarative intents (conjunctive field filters) resolve to selections
with closed-path semantics so both input methods yield identical facts.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass
from enum import Enum

from .chart import ChartClass, ChartSpec, breakdown_encoding, is_complex, measure_encoding
from .dataset import ColumnType, DataTable, axis_number, cell_label
from .errors import EmptyResult, EmptySelection, NoAdmissibleFacts, TypeMismatch, UnknownField
from .sketch import PathKind, Scope, Selection


class FactType(Enum):
    VALUE = "value"
    DIFFERENCE = "difference"
    PROPORTION = "proportion"
    TREND = "trend"
    RANK = "rank"
    DISTRIBUTION = "distribution"
    EXTREME = "extreme"
    OUTLIER = "outlier"


#: realization order inside a card
FACT_PRIORITY = (
    FactType.TREND,
    FactType.EXTREME,
    FactType.OUTLIER,
    FactType.DIFFERENCE,
    FactType.RANK,
    FactType.PROPORTION,
    FactType.DISTRIBUTION,
    FactType.VALUE,
)

MIN_FOCUS_TREND = 2
MIN_FOCUS_SPREAD = 5  # distribution and outlier need a handful of points
MAX_FOCUS_VALUE = 3


@dataclass(frozen=True)
class FactQuery:
    fact_types: tuple[FactType, ...]
    focus: tuple[int, ...]
    context: tuple[int, ...]
    measure: str
    breakdown: str
    category: str | None
    mode: str  # separate | all | same_category | same_x | range | group | legend
    scope_label: str
    context_label: str

    def to_dict(self) -> dict:
        return {
            "factTypes": [t.value for t in self.fact_types],
            "focus": list(self.focus),
            "context": list(self.context),
            "measure": self.measure,
            "breakdown": self.breakdown,
            "category": self.category,
            "mode": self.mode,
            "scopeLabel": self.scope_label,
            "contextLabel": self.context_label,
        }


def admissible_fact_types(sel: Selection, chart: ChartClass, x_type: ColumnType) -> set[FactType]:
    """Fact types that make sense for this selection, chart, and x type."""
    size = len(sel.row_ids)
    if sel.kind is PathKind.OPEN:
        # open strokes express shapes: trends on temporal charts, the spread/
        # association summary on numeric-x scatters
        out: set[FactType] = set()
        if x_type is ColumnType.TEMPORAL and size >= MIN_FOCUS_TREND:
            out.add(FactType.TREND)
        elif chart is ChartClass.SCATTER and size >= MIN_FOCUS_SPREAD:
            out.add(FactType.DISTRIBUTION)
        return out

    separate = sel.scope is Scope.ITEMS and size >= 2
    out = set(FactType)
    if x_type is not ColumnType.TEMPORAL or size < MIN_FOCUS_TREND:
        out.discard(FactType.TREND)
    if size < 2 and not (is_complex(chart) and size == 1):
        out.discard(FactType.DIFFERENCE)
    if size < MIN_FOCUS_SPREAD:
        out.discard(FactType.DISTRIBUTION)
        out.discard(FactType.OUTLIER)
    if x_type is ColumnType.NUMERICAL:
        out.discard(FactType.PROPORTION)  # no partitioning breakdown
    if size > MAX_FOCUS_VALUE:
        out.discard(FactType.VALUE)
    if separate:
        out.discard(FactType.EXTREME)  # context == focus makes it vacuous
    return out


def _ordered(types: set[FactType]) -> tuple[FactType, ...]:
    return tuple(t for t in FACT_PRIORITY if t in types)


def _visible_rows(spec: ChartSpec) -> list[int]:
    fields = [breakdown_encoding(spec).field, measure_encoding(spec).field]
    if spec.color:
        fields.append(spec.color.field)
    cols = [spec.table.column(f) for f in fields]
    return [i for i in range(spec.table.row_count) if all(c.values[i] is not None for c in cols)]


def expand_queries(sel: Selection, chart: ChartClass, spec: ChartSpec) -> list[FactQuery]:
    """Turn a selection into concrete fact queries (focus, context, types)."""
    table = spec.table
    measure = measure_encoding(spec).field
    x_enc = breakdown_encoding(spec)
    category = spec.color.field if spec.color else None
    visible = _visible_rows(spec)
    focus = tuple(sorted(set(sel.row_ids) & set(visible)))
    if not focus:
        raise EmptySelection("selection contains no chart-visible items")
    trimmed = Selection(sel.kind, frozenset(focus), sel.scope, sel.range, sel.group,
                        sel.legend_categories, sel.tie)
    admissible = admissible_fact_types(trimmed, chart, x_enc.type)
    if FactType.TREND in admissible:
        x_col = table.column(x_enc.field)
        if len({x_col.values[i] for i in focus}) < MIN_FOCUS_TREND:
            admissible = admissible - {FactType.TREND}  # e.g. two bars of one year

    def query(types: tuple[FactType, ...], context: tuple[int, ...], mode: str,
              scope_label: str, context_label: str) -> FactQuery:
        return FactQuery(types, focus, context, measure, x_enc.field, category,
                         mode, scope_label, context_label)

    queries: list[FactQuery] = []
    if sel.scope is Scope.LEGEND_CATEGORY:
        context = tuple(visible)
        for t in _ordered(admissible):
            queries.append(query((t,), context, "legend", "vs. all items", "all items"))
    elif sel.kind is PathKind.OPEN:
        mode = "group" if sel.scope is Scope.GROUP else "range"
        label = "within the selected range"
        for t in _ordered(admissible):
            queries.append(query((t,), focus, mode, label, "the selected range"))
    elif len(focus) == 1 and is_complex(chart):
        row = focus[0]
        cat_col = table.column(category)
        x_col = table.column(x_enc.field)
        same_cat = tuple(i for i in visible if cat_col.values[i] == cat_col.values[row])
        same_x = tuple(i for i in visible if x_col.values[i] == x_col.values[row])
        types = _ordered(admissible)
        cat_label = f"{cat_col.values[row]} ({category})"
        x_label = f"{cell_label(x_col.values[row], x_enc.type)} ({x_enc.field})"
        queries.append(query(types, tuple(visible), "all", "vs. all items", "all items"))
        queries.append(query(types, same_cat, "same_category", f"vs. same {category}", cat_label))
        queries.append(query(types, same_x, "same_x", f"vs. same {x_enc.field}", x_label))
    elif len(focus) == 1:
        context = tuple(visible)
        for t in _ordered(admissible):
            queries.append(query((t,), context, "all", "vs. all items", "all items"))
    else:
        # multi-item lasso: the selection is its own dataset
        for t in _ordered(admissible):
            queries.append(query((t,), focus, "separate", "within the selection", "the selected items"))

    if not queries:
        raise NoAdmissibleFacts("no fact type fits this selection")
    return queries


# -- declarative intents -------------------------------------------------------

_OPS = ("=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Filter:
    field: str
    op: str
    value: object


@dataclass(frozen=True)
class DeclarativeIntent:
    filters: tuple[Filter, ...]


def parse_intent_doc(doc: dict) -> DeclarativeIntent:
    filters = []
    for f in doc.get("filters", []):
        op = f.get("op", "=")
        if op not in _OPS:
            raise TypeMismatch(f"unsupported operator {op!r}")
        filters.append(Filter(f["field"], op, f["value"]))
    return DeclarativeIntent(tuple(filters))


def _filter_number(value, ctype: ColumnType) -> float:
    if isinstance(value, str) and ctype is ColumnType.TEMPORAL:
        if "-" in value:
            return axis_number(_dt.date.fromisoformat(value), ctype)
        return float(int(value))
    return float(value)


def _matches(cell, op: str, value, ctype: ColumnType) -> bool:
    if cell is None:
        return False
    if ctype is ColumnType.CATEGORICAL:
        if op != "=":
            raise TypeMismatch(f"operator {op!r} needs a numerical or temporal field")
        return str(cell) == str(value)
    try:
        left = axis_number(cell, ctype)
        right = _filter_number(value, ctype)
    except (TypeError, ValueError) as exc:
        raise TypeMismatch(f"value {value!r} is not comparable to field values") from exc
    if op == "=":
        return left == right
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    return left >= right


def parse_declarative_intent(doc: dict, table: DataTable) -> Selection:
    """Resolve a conjunctive filter document to a closed-semantics selection."""
    intent = parse_intent_doc(doc)
    for f in intent.filters:
        table.column(f.field)  # raises UnknownField
    rows = []
    for i in range(table.row_count):
        ok = True
        for f in intent.filters:
            col = table.column(f.field)
            if not _matches(col.values[i], f.op, f.value, col.type):
                ok = False
                break
        if ok:
            rows.append(i)
    if not rows:
        raise EmptyResult("no rows satisfy the intent filters")
    return Selection(PathKind.CLOSED, frozenset(rows), Scope.ITEMS)
