"""Statistical kernels that turn fact queries into typed data facts.

Quartiles pin the linear-interpolation convention (h = (n-1)p + 1 on the
sorted sample); outliers use the 1.5*IQR fences; trends segment a series
into maximal runs of same-signed steps and lean on a least-squares slope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import ColumnType, DataTable, axis_number, cell_label
from .errors import TooFewPoints, TooFewValues
from .intent import FactQuery, FactType, MIN_FOCUS_SPREAD

IQR_FACTOR = 1.5
#: share of steps that must agree with the slope for a clean trend direction
TREND_STEP_SHARE = 0.75
#: |ratio - round(ratio)| / round(ratio) below this reads as "k times"
RATIO_TOLERANCE = 0.01
#: |pearson r| below this counts as no association
CORRELATION_FLOOR = 0.2


@dataclass(frozen=True)
class DataFact:
    fact_type: FactType
    params: dict
    focus: tuple[int, ...]
    context: tuple[int, ...]
    measure: str
    breakdown: str
    category: str | None
    scope_label: str
    context_label: str

    def to_dict(self) -> dict:
        return {
            "factType": self.fact_type.value,
            "params": self.params,
            "focus": list(self.focus),
            "context": list(self.context),
            "measure": self.measure,
            "breakdown": self.breakdown,
            "category": self.category,
            "scopeLabel": self.scope_label,
            "contextLabel": self.context_label,
        }


# -- kernels -------------------------------------------------------------------

def quartiles(values: list[float]) -> tuple[float, float]:
    """(Q1, Q3) by linear interpolation between closest ranks."""
    if len(values) < 4:
        raise TooFewValues(f"quartiles need at least 4 values, got {len(values)}")
    arr = np.asarray(values, dtype=float)
    q1, q3 = np.quantile(arr, [0.25, 0.75])
    return float(q1), float(q3)


def detect_outliers(values: list[float], row_ids: list[int]) -> list[int]:
    """Rows whose value falls outside [Q1 - 1.5*IQR, Q3 + 1.5*IQR]."""
    if len(values) < 5:
        raise TooFewValues(f"outlier detection needs at least 5 values, got {len(values)}")
    q1, q3 = quartiles(values)
    iqr = q3 - q1
    lo = q1 - IQR_FACTOR * iqr
    hi = q3 + IQR_FACTOR * iqr
    return sorted(r for r, v in zip(row_ids, values) if v < lo or v > hi)


@dataclass(frozen=True)
class TrendSegment:
    start_index: int
    end_index: int
    direction: str  # increasing | decreasing | steady


@dataclass(frozen=True)
class TrendSummary:
    direction: str  # increasing | decreasing | wavering
    slope: float
    segments: tuple[TrendSegment, ...]


def detect_trend(series: list[tuple[float, float]]) -> TrendSummary:
    """Segment a series by step sign and classify the overall direction."""
    if len(series) < 2:
        raise TooFewPoints("a trend needs at least 2 points")
    xs = [p[0] for p in series]
    ys = [p[1] for p in series]
    if any(xs[i] >= xs[i + 1] for i in range(len(xs) - 1)):
        raise TooFewPoints("series x values must be strictly increasing")

    def sign(d: float) -> int:
        return 0 if d == 0 else (1 if d > 0 else -1)

    steps = [sign(ys[i + 1] - ys[i]) for i in range(len(ys) - 1)]
    words = {1: "increasing", -1: "decreasing", 0: "steady"}
    segments: list[TrendSegment] = []
    start = 0
    for i in range(1, len(steps)):
        if steps[i] != steps[start]:
            segments.append(TrendSegment(start, i, words[steps[start]]))
            start = i
    segments.append(TrendSegment(start, len(steps), words[steps[start]]))

    x_arr = np.asarray(xs, dtype=float)
    y_arr = np.asarray(ys, dtype=float)
    x_c = x_arr - x_arr.mean()
    slope = float((x_c * (y_arr - y_arr.mean())).sum() / (x_c * x_c).sum())
    non_negative = sum(1 for s in steps if s >= 0) / len(steps)
    non_positive = sum(1 for s in steps if s <= 0) / len(steps)
    if slope > 0 and non_negative >= TREND_STEP_SHARE:
        direction = "increasing"
    elif slope < 0 and non_positive >= TREND_STEP_SHARE:
        direction = "decreasing"
    else:
        direction = "wavering"
    return TrendSummary(direction, slope, tuple(segments))


# -- fact assembly ---------------------------------------------------------------

def _item(table: DataTable, row: int, query: FactQuery) -> dict:
    x_col = table.column(query.breakdown)
    x_label = cell_label(x_col.values[row], x_col.type)
    cat = str(table.value(query.category, row)) if query.category else None
    if cat is not None:
        label = f"{cat} ({query.category}) in {x_label}"
    elif x_col.type is ColumnType.NUMERICAL:
        label = f"{query.breakdown} {x_label}"
    else:
        label = x_label
    return {"rowId": row, "label": label, "x": x_label, "category": cat}


def _focus_label(table: DataTable, query: FactQuery) -> dict:
    """Collective label for a multi-row focus (one category, one item, or generic)."""
    if query.category:
        cats = {str(table.value(query.category, r)) for r in query.focus}
        if len(cats) == 1:
            cat = cats.pop()
            return {"rowId": None, "label": f"{cat} ({query.category})", "x": None, "category": cat}
    if len(query.focus) == 1:
        return _item(table, query.focus[0], query)
    return {"rowId": None, "label": "the selected items", "x": None, "category": None}


def _values(table: DataTable, query: FactQuery, rows: tuple[int, ...]) -> list[float]:
    col = table.column(query.measure)
    return [float(col.values[r]) for r in rows]


def _make(query: FactQuery, fact_type: FactType, params: dict) -> DataFact:
    return DataFact(fact_type, params, query.focus, query.context, query.measure,
                    query.breakdown, query.category, query.scope_label, query.context_label)


def _value_facts(query: FactQuery, table: DataTable) -> list[DataFact]:
    vals = dict(zip(query.focus, _values(table, query, query.focus)))
    return [
        _make(query, FactType.VALUE, {"item": _item(table, r, query), "value": vals[r]})
        for r in query.focus
    ]


def _difference_facts(query: FactQuery, table: DataTable) -> list[DataFact]:
    col = table.column(query.measure)

    def val(r: int) -> float:
        return float(col.values[r])

    if len(query.focus) >= 2:
        ordered = sorted(query.focus, key=lambda r: (-val(r), r))
        a, b = ordered[0], ordered[-1]
    else:
        others = [r for r in query.context if r not in query.focus]
        if not others:
            return []
        f = query.focus[0]
        top_other = min(others, key=lambda r: (-val(r), r))
        if val(f) >= val(top_other):  # focus leads: contrast against the lowest
            counterpart = min(others, key=lambda r: (val(r), r))
        else:
            counterpart = top_other
        a, b = (f, counterpart) if val(f) >= val(counterpart) else (counterpart, f)
    va, vb = val(a), val(b)
    params = {
        "itemA": _item(table, a, query),
        "valueA": va,
        "itemB": _item(table, b, query),
        "valueB": vb,
        "delta": va - vb,
    }
    if vb != 0:
        ratio = va / vb
        params["ratio"] = ratio
        k = round(ratio)
        if k >= 2 and abs(ratio - k) <= RATIO_TOLERANCE * k:
            params["ratioInteger"] = int(k)
        else:
            params["percent"] = (va - vb) / vb * 100.0
    return [_make(query, FactType.DIFFERENCE, params)]


def _proportion_facts(query: FactQuery, table: DataTable) -> list[DataFact]:
    context_total = sum(_values(table, query, query.context))
    if context_total == 0:
        return []  # share undefined; delta-style facts still cover the card
    if query.mode == "separate":
        vals = dict(zip(query.focus, _values(table, query, query.focus)))
        return [
            _make(query, FactType.PROPORTION,
                  {"item": _item(table, r, query), "value": vals[r],
                   "share": vals[r] / context_total})
            for r in query.focus
        ]
    focus_total = sum(_values(table, query, query.focus))
    return [_make(query, FactType.PROPORTION,
                  {"item": _focus_label(table, query), "value": focus_total,
                   "share": focus_total / context_total})]


def _trend_facts(query: FactQuery, table: DataTable) -> list[DataFact]:
    x_col = table.column(query.breakdown)
    col = table.column(query.measure)
    by_x: dict[float, list[float]] = {}
    labels: dict[float, str] = {}
    for r in query.focus:
        xn = axis_number(x_col.values[r], x_col.type)
        by_x.setdefault(xn, []).append(float(col.values[r]))
        labels[xn] = cell_label(x_col.values[r], x_col.type)
    series = [(xn, sum(vs) / len(vs)) for xn, vs in sorted(by_x.items())]
    if len(series) < 2:
        raise TooFewPoints("trend needs at least 2 distinct breakdown values")
    summary = detect_trend(series)
    xs = [s[0] for s in series]
    ys = [s[1] for s in series]
    series_info = None
    if query.category:
        cats = {str(table.value(query.category, r)) for r in query.focus}
        if len(cats) == 1:
            cat = cats.pop()
            series_info = {"label": f"{cat} ({query.category})", "category": cat}
    params = {
        "direction": summary.direction,
        "slope": summary.slope,
        "series": series_info,
        "startX": labels[xs[0]],
        "endX": labels[xs[-1]],
        "startValue": ys[0],
        "endValue": ys[-1],
        "segments": [
            {"startX": labels[xs[s.start_index]], "endX": labels[xs[s.end_index]],
             "direction": s.direction}
            for s in summary.segments
        ],
    }
    return [_make(query, FactType.TREND, params)]


def _rank_facts(query: FactQuery, table: DataTable) -> list[DataFact]:
    if len(query.context) < 2:
        return []
    col = table.column(query.measure)

    def val(r: int) -> float:
        return float(col.values[r])

    context_vals = sorted({val(r) for r in query.context}, reverse=True)
    position = {v: i + 1 for i, v in enumerate(context_vals)}  # dense ranks
    top = min(query.focus, key=lambda r: (-val(r), r))
    last = max(query.focus, key=lambda r: (-val(r), r))
    params = {
        "top": {"item": _item(table, top, query), "value": val(top), "position": position[val(top)]},
        "last": {"item": _item(table, last, query), "value": val(last), "position": position[val(last)]},
        "contextSize": len(query.context),
    }
    return [_make(query, FactType.RANK, params)]


def _distribution_facts(query: FactQuery, table: DataTable) -> list[DataFact]:
    vals = _values(table, query, query.focus)
    if len(vals) < MIN_FOCUS_SPREAD:
        return []
    arr = np.asarray(vals, dtype=float)
    q1, q3 = quartiles(vals)
    params = {
        "count": len(vals),
        "mean": float(arr.mean()),
        "median": float(np.median(arr)),
        "min": float(arr.min()),
        "max": float(arr.max()),
        "q1": q1,
        "q3": q3,
    }
    x_col = table.column(query.breakdown)
    if x_col.type is ColumnType.NUMERICAL:
        xs = np.asarray([float(x_col.values[r]) for r in query.focus])
        if float(xs.std()) > 0 and float(arr.std()) > 0:
            r = float(np.corrcoef(xs, arr)[0, 1])
        else:
            r = 0.0
        params["correlation"] = ("positive" if r >= CORRELATION_FLOOR
                                 else "negative" if r <= -CORRELATION_FLOOR else "none")
        params["correlationR"] = r
    return [_make(query, FactType.DISTRIBUTION, params)]


def _extreme_facts(query: FactQuery, table: DataTable) -> list[DataFact]:
    if len(query.context) < 2:
        return []
    col = table.column(query.measure)
    vals = {r: float(col.values[r]) for r in query.context}
    hi = max(vals.values())
    lo = min(vals.values())
    if hi == lo:
        return []
    facts = []
    for r in query.focus:
        if vals[r] == hi:
            facts.append(_make(query, FactType.EXTREME,
                               {"item": _item(table, r, query), "value": vals[r], "kind": "max"}))
        elif vals[r] == lo:
            facts.append(_make(query, FactType.EXTREME,
                               {"item": _item(table, r, query), "value": vals[r], "kind": "min"}))
    return facts


def _outlier_facts(query: FactQuery, table: DataTable) -> list[DataFact]:
    rows = list(query.context)
    vals = _values(table, query, query.context)
    if len(vals) < 5:
        return []
    out_rows = detect_outliers(vals, rows)
    if not out_rows:
        return []
    q1, q3 = quartiles(vals)
    iqr = q3 - q1
    col = table.column(query.measure)
    focus_set = set(query.focus)
    params = {
        "outliers": [
            {"item": _item(table, r, query), "value": float(col.values[r]), "isFocus": r in focus_set}
            for r in out_rows
        ],
        "q1": q1,
        "q3": q3,
        "fenceLow": q1 - IQR_FACTOR * iqr,
        "fenceHigh": q3 + IQR_FACTOR * iqr,
    }
    return [_make(query, FactType.OUTLIER, params)]


_KERNELS = {
    FactType.VALUE: _value_facts,
    FactType.DIFFERENCE: _difference_facts,
    FactType.PROPORTION: _proportion_facts,
    FactType.TREND: _trend_facts,
    FactType.RANK: _rank_facts,
    FactType.DISTRIBUTION: _distribution_facts,
    FactType.EXTREME: _extreme_facts,
    FactType.OUTLIER: _outlier_facts,
}


def compute_fact(query: FactQuery, table: DataTable) -> list[DataFact]:
    """Evaluate every fact type carried by the query, in priority order."""
    facts: list[DataFact] = []
    for fact_type in query.fact_types:
        facts.extend(_KERNELS[fact_type](query, table))
    return facts
