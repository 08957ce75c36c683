"""Deterministic chart layout: scene graphs with row-bound geometry, and SVG output.

All geometry lives in a fixed canvas coordinate space so sketches recorded
against the rendered chart can be hit-tested reproducibly. Rendering is a
pure function: identical scenes produce byte-identical SVG.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .chart import ChartClass, ChartSpec, breakdown_encoding, classify_chart, measure_encoding, slice_field
from .dataset import Cell, ColumnType, axis_number, cell_label, format_number
from .dataset import cell_to_json
from .errors import NegativeBarValue, OutOfPlotArea

#: categorical palette, assigned by first appearance
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

BAND_PADDING_INNER = 0.1
BAND_PADDING_OUTER = 0.05
POINT_RADIUS = 4.0
MAX_BAND_TEMPORAL = 50


@dataclass(frozen=True)
class Viewport:
    width: float = 640.0
    height: float = 400.0
    margin: float = 40.0

    @property
    def plot_left(self) -> float:
        return self.margin

    @property
    def plot_right(self) -> float:
        return self.width - self.margin

    @property
    def plot_top(self) -> float:
        return self.margin

    @property
    def plot_bottom(self) -> float:
        return self.height - self.margin

    @property
    def plot_width(self) -> float:
        return self.plot_right - self.plot_left

    @property
    def plot_height(self) -> float:
        return self.plot_bottom - self.plot_top

    def to_dict(self) -> dict:
        return {"width": self.width, "height": self.height, "margin": self.margin}


@dataclass(frozen=True)
class LinearScale:
    domain: tuple[float, float]
    range: tuple[float, float]

    @staticmethod
    def fit(lo: float, hi: float, range_: tuple[float, float], pin_zero: bool = False) -> "LinearScale":
        if pin_zero:
            lo = min(lo, 0.0)
        if lo == hi:  # degenerate domain: expand by +-0.5
            lo, hi = lo - 0.5, hi + 0.5
            if pin_zero:
                lo = max(lo, 0.0) if hi > 0 else lo
                lo = 0.0
        return LinearScale((lo, hi), range_)

    def apply(self, v: float) -> float:
        d0, d1 = self.domain
        r0, r1 = self.range
        return r0 + (v - d0) / (d1 - d0) * (r1 - r0)

    def invert(self, px: float) -> float:
        d0, d1 = self.domain
        r0, r1 = self.range
        return d0 + (px - r0) / (r1 - r0) * (d1 - d0)

    def to_dict(self) -> dict:
        return {"kind": "linear", "domain": list(self.domain), "range": list(self.range)}


@dataclass(frozen=True)
class BandScale:
    domain: tuple[Cell, ...]
    range: tuple[float, float]
    padding_inner: float = BAND_PADDING_INNER
    padding_outer: float = BAND_PADDING_OUTER

    @property
    def step(self) -> float:
        n = len(self.domain)
        if n == 0:
            return self.range[1] - self.range[0]
        return (self.range[1] - self.range[0]) / (n - self.padding_inner + 2 * self.padding_outer)

    @property
    def bandwidth(self) -> float:
        return self.step * (1 - self.padding_inner)

    def position(self, index: int) -> float:
        return self.range[0] + self.step * self.padding_outer + index * self.step

    def center(self, index: int) -> float:
        return self.position(index) + self.bandwidth / 2

    def band_at(self, px: float) -> int:
        """Band whose slot contains px; slots partition the plot width."""
        r0, r1 = self.range
        if not self.domain:
            raise OutOfPlotArea("scale has no bands")
        if px < r0 or px > r1:
            raise OutOfPlotArea(f"x={px} outside [{r0}, {r1}]")
        index = int((px - r0) // self.step)
        return min(max(index, 0), len(self.domain) - 1)

    def index_of(self, value: Cell) -> int:
        return self.domain.index(value)

    def to_dict(self) -> dict:
        return {
            "kind": "band",
            "domain": [cell_to_json(v) for v in self.domain],
            "range": list(self.range),
            "step": self.step,
            "bandwidth": self.bandwidth,
        }


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}


@dataclass(frozen=True)
class RectMark:
    row_id: int
    x: float
    y: float
    w: float
    h: float
    color: str
    series_key: str | None = None


@dataclass(frozen=True)
class PointMark:
    row_id: int
    cx: float
    cy: float
    r: float
    color: str
    series_key: str | None = None


@dataclass(frozen=True)
class ArcSliceMark:
    row_id: int
    cx: float
    cy: float
    r: float
    start_angle: float
    end_angle: float
    color: str
    series_key: str | None = None


@dataclass(frozen=True)
class LineVertexMark:
    row_id: int
    x: float
    y: float
    color: str
    series_key: str | None = None


Mark = RectMark | PointMark | ArcSliceMark | LineVertexMark


@dataclass(frozen=True)
class LegendEntry:
    category: str
    label_box: Rect
    color: str


@dataclass(frozen=True)
class SceneGraph:
    chart_class: ChartClass
    marks: tuple[Mark, ...]
    legend: tuple[LegendEntry, ...]
    x_scale: LinearScale | BandScale | None
    y_scale: LinearScale | None
    viewport: Viewport
    title: str | None = None


def _visible_rows(spec: ChartSpec) -> list[int]:
    """Rows that get a mark: every encoded cell present."""
    fields = [breakdown_encoding(spec).field, measure_encoding(spec).field]
    if spec.color:
        fields.append(spec.color.field)
    cols = [spec.table.column(f) for f in fields]
    return [i for i in range(spec.table.row_count) if all(c.values[i] is not None for c in cols)]


def _category_domain(spec: ChartSpec, rows: list[int], enc_field: str) -> list[str]:
    seen: list[str] = []
    col = spec.table.column(enc_field)
    for i in rows:
        v = col.values[i]
        if v not in seen:
            seen.append(v)
    return seen


def _band_domain(spec: ChartSpec, rows: list[int]) -> tuple[Cell, ...]:
    enc = breakdown_encoding(spec)
    col = spec.table.column(enc.field)
    values = []
    for i in rows:
        if col.values[i] not in values:
            values.append(col.values[i])
    if enc.type is ColumnType.TEMPORAL:
        values.sort(key=lambda v: axis_number(v, enc.type))
    return tuple(values)


def _legend_entries(categories: list[str], colors: dict[str, str], viewport: Viewport) -> tuple[LegendEntry, ...]:
    if not categories:
        return ()
    box_h = 16.0
    text_w = 7.0 * max(len(c) for c in categories)
    box_w = 12.0 + 4.0 + text_w + 8.0
    x = viewport.plot_right - box_w - 4.0
    entries = []
    for i, cat in enumerate(categories):
        y = viewport.plot_top + 4.0 + i * (box_h + 4.0)
        entries.append(LegendEntry(cat, Rect(x, y, box_w, box_h), colors[cat]))
    return tuple(entries)


def layout_chart(spec: ChartSpec, viewport: Viewport = Viewport()) -> SceneGraph:
    """Compute mark geometry, scales, and legend boxes for a chart spec."""
    chart_class = classify_chart(spec)
    rows = _visible_rows(spec)
    measure = spec.table.column(measure_encoding(spec).field)
    x_enc = breakdown_encoding(spec)
    x_col = spec.table.column(x_enc.field)
    colors: dict[str, str] = {}
    legend: tuple[LegendEntry, ...] = ()
    marks: list[Mark] = []
    x_scale: LinearScale | BandScale | None = None
    y_scale: LinearScale | None = None
    x_range = (viewport.plot_left, viewport.plot_right)
    y_range = (viewport.plot_bottom, viewport.plot_top)

    if chart_class is ChartClass.PIE:
        total = 0.0
        for i in rows:
            v = float(measure.values[i])
            if v < 0:
                raise NegativeBarValue(f"pie measure for row {i} is negative ({v})")
            total += v
        cx = (viewport.plot_left + viewport.plot_right) / 2
        cy = (viewport.plot_top + viewport.plot_bottom) / 2
        radius = min(viewport.plot_width, viewport.plot_height) / 2 - 10
        cats = _category_domain(spec, rows, slice_field(spec).field)
        colors = {c: PALETTE[i % len(PALETTE)] for i, c in enumerate(cats)}
        angle = -math.pi / 2
        for i in rows:
            share = float(measure.values[i]) / total if total > 0 else 1.0 / len(rows)
            end = angle + share * 2 * math.pi
            cat = spec.table.value(slice_field(spec).field, i)
            marks.append(ArcSliceMark(i, cx, cy, radius, angle, end, colors[cat], cat))
            angle = end
        return SceneGraph(chart_class, tuple(marks), (), None, None, viewport, spec.title)

    distinct_x = len({x_col.values[i] for i in rows})
    use_band = x_enc.type is ColumnType.CATEGORICAL or (
        spec.mark == "bar"
        and x_enc.type is ColumnType.TEMPORAL
        and (spec.color is not None or distinct_x <= MAX_BAND_TEMPORAL)
    )

    values = [float(measure.values[i]) for i in rows]
    if spec.mark == "bar":
        for i, v in zip(rows, values):
            if v < 0:
                raise NegativeBarValue(f"bar measure for row {i} is negative ({v})")
        y_scale = LinearScale.fit(min(values, default=0.0), max(values, default=0.0), y_range, pin_zero=True)
    else:
        y_scale = LinearScale.fit(min(values, default=0.0), max(values, default=0.0), y_range)

    if use_band:
        x_scale = BandScale(_band_domain(spec, rows), x_range)
    else:
        xs = [axis_number(x_col.values[i], x_enc.type) for i in rows]
        lo, hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
        x_scale = LinearScale.fit(lo, hi, x_range)

    if spec.color:
        cats = _category_domain(spec, rows, spec.color.field)
        colors = {c: PALETTE[i % len(PALETTE)] for i, c in enumerate(cats)}
        legend = _legend_entries(cats, colors, viewport)

    def row_color(i: int) -> str:
        if spec.color:
            return colors[spec.table.value(spec.color.field, i)]
        return PALETTE[0]

    def row_series(i: int) -> str | None:
        return spec.table.value(spec.color.field, i) if spec.color else None

    if spec.mark == "bar":
        baseline = y_scale.apply(0.0)
        if isinstance(x_scale, BandScale) and spec.color:
            inner = BandScale(tuple(_category_domain(spec, rows, spec.color.field)), (0.0, x_scale.bandwidth))
            for i, v in zip(rows, values):
                bi = x_scale.index_of(x_col.values[i])
                ci = inner.index_of(spec.table.value(spec.color.field, i))
                top = y_scale.apply(v)
                marks.append(RectMark(i, x_scale.position(bi) + inner.position(ci), top,
                                      inner.bandwidth, baseline - top, row_color(i), row_series(i)))
        elif isinstance(x_scale, BandScale):
            for i, v in zip(rows, values):
                bi = x_scale.index_of(x_col.values[i])
                top = y_scale.apply(v)
                marks.append(RectMark(i, x_scale.position(bi), top, x_scale.bandwidth,
                                      baseline - top, row_color(i)))
        else:
            # dense temporal axis: fixed-width bars centred on their x position
            width = viewport.plot_width / max(distinct_x, 1) * 0.8
            for i, v in zip(rows, values):
                cx = x_scale.apply(axis_number(x_col.values[i], x_enc.type))
                top = y_scale.apply(v)
                marks.append(RectMark(i, cx - width / 2, top, width, baseline - top, row_color(i)))
    elif spec.mark == "line":
        order = sorted(rows, key=lambda i: (row_series(i) or "", axis_number(x_col.values[i], x_enc.type)))
        for i in order:
            px = (x_scale.center(x_scale.index_of(x_col.values[i]))
                  if isinstance(x_scale, BandScale)
                  else x_scale.apply(axis_number(x_col.values[i], x_enc.type)))
            marks.append(LineVertexMark(i, px, y_scale.apply(float(measure.values[i])), row_color(i), row_series(i)))
    else:  # point
        for i in rows:
            px = (x_scale.center(x_scale.index_of(x_col.values[i]))
                  if isinstance(x_scale, BandScale)
                  else x_scale.apply(axis_number(x_col.values[i], x_enc.type)))
            marks.append(PointMark(i, px, y_scale.apply(float(measure.values[i])), POINT_RADIUS,
                                   row_color(i), row_series(i)))

    return SceneGraph(chart_class, tuple(marks), legend, x_scale, y_scale, viewport, spec.title)


def invert_x(scene: SceneGraph, px: float) -> Cell:
    """Map a plot-area pixel back to a domain value (or band value)."""
    vp = scene.viewport
    if px < vp.plot_left or px > vp.plot_right:
        raise OutOfPlotArea(f"x={px} outside plot area [{vp.plot_left}, {vp.plot_right}]")
    if scene.x_scale is None:
        raise OutOfPlotArea("chart has no x scale")
    if isinstance(scene.x_scale, BandScale):
        return scene.x_scale.domain[scene.x_scale.band_at(px)]
    return scene.x_scale.invert(px)


def mark_anchor(mark: Mark) -> tuple[float, float]:
    """Point representing a mark for distance and range tests (bar: top-center)."""
    if isinstance(mark, RectMark):
        return (mark.x + mark.w / 2, mark.y)
    if isinstance(mark, PointMark):
        return (mark.cx, mark.cy)
    if isinstance(mark, LineVertexMark):
        return (mark.x, mark.y)
    return (mark.cx, mark.cy)


# -- serialization -----------------------------------------------------------

def _mark_dict(mark: Mark) -> dict:
    if isinstance(mark, RectMark):
        shape = {"kind": "rect", "x": mark.x, "y": mark.y, "w": mark.w, "h": mark.h}
    elif isinstance(mark, PointMark):
        shape = {"kind": "point", "cx": mark.cx, "cy": mark.cy, "r": mark.r}
    elif isinstance(mark, ArcSliceMark):
        shape = {"kind": "arc", "cx": mark.cx, "cy": mark.cy, "r": mark.r,
                 "startAngle": mark.start_angle, "endAngle": mark.end_angle}
    else:
        shape = {"kind": "lineVertex", "x": mark.x, "y": mark.y}
    return {"rowId": mark.row_id, "shape": shape, "color": mark.color, "seriesKey": mark.series_key}


def scene_to_dict(scene: SceneGraph) -> dict:
    """JSON form of the scene graph consumed by UIs."""
    return {
        "chartClass": scene.chart_class.value,
        "viewport": scene.viewport.to_dict(),
        "marks": [_mark_dict(m) for m in scene.marks],
        "legend": [
            {"category": e.category, "labelBox": e.label_box.to_dict(), "color": e.color}
            for e in scene.legend
        ],
        "xScale": scene.x_scale.to_dict() if scene.x_scale else None,
        "yScale": scene.y_scale.to_dict() if scene.y_scale else None,
        "title": scene.title,
    }


# -- SVG ---------------------------------------------------------------------

def _f(v: float) -> str:
    """Fixed 2-decimal float formatting keeps output byte-stable."""
    return f"{v:.2f}"


def _axis_ticks(scale: LinearScale | BandScale, x_axis: bool) -> list[tuple[float, str]]:
    if isinstance(scale, BandScale):
        return [(scale.center(i), cell_label(v, ColumnType.TEMPORAL if not isinstance(v, str) else ColumnType.CATEGORICAL))
                for i, v in enumerate(scale.domain)]
    d0, d1 = scale.domain
    ticks = []
    for k in range(5):
        v = d0 + k * (d1 - d0) / 4
        ticks.append((scale.apply(v), format_number(v)))
    return ticks


def render_svg(scene: SceneGraph) -> str:
    """Serialize the scene to SVG 1.1; every mark carries a data-row attribute."""
    vp = scene.viewport
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(vp.width)}" '
        f'height="{_f(vp.height)}" viewBox="0 0 {_f(vp.width)} {_f(vp.height)}">',
        f'<rect x="0" y="0" width="{_f(vp.width)}" height="{_f(vp.height)}" fill="#ffffff"/>',
    ]
    if scene.title:
        out.append(
            f'<text x="{_f(vp.width / 2)}" y="{_f(vp.plot_top / 2 + 4)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{escape(scene.title)}</text>'
        )
    if scene.chart_class is not ChartClass.PIE and scene.x_scale is not None:
        out.append(f'<line x1="{_f(vp.plot_left)}" y1="{_f(vp.plot_bottom)}" x2="{_f(vp.plot_right)}" '
                   f'y2="{_f(vp.plot_bottom)}" stroke="#333333"/>')
        out.append(f'<line x1="{_f(vp.plot_left)}" y1="{_f(vp.plot_top)}" x2="{_f(vp.plot_left)}" '
                   f'y2="{_f(vp.plot_bottom)}" stroke="#333333"/>')
        for px, label in _axis_ticks(scene.x_scale, True):
            out.append(f'<line x1="{_f(px)}" y1="{_f(vp.plot_bottom)}" x2="{_f(px)}" '
                       f'y2="{_f(vp.plot_bottom + 4)}" stroke="#333333"/>')
            out.append(f'<text x="{_f(px)}" y="{_f(vp.plot_bottom + 16)}" text-anchor="middle" '
                       f'font-family="sans-serif" font-size="10">{escape(label)}</text>')
        if scene.y_scale is not None:
            for py, label in _axis_ticks(scene.y_scale, False):
                out.append(f'<line x1="{_f(vp.plot_left - 4)}" y1="{_f(py)}" x2="{_f(vp.plot_left)}" '
                           f'y2="{_f(py)}" stroke="#333333"/>')
                out.append(f'<text x="{_f(vp.plot_left - 6)}" y="{_f(py + 3)}" text-anchor="end" '
                           f'font-family="sans-serif" font-size="10">{escape(label)}</text>')

    # series polylines sit beneath their vertices
    series: dict[str, list[LineVertexMark]] = {}
    for mark in scene.marks:
        if isinstance(mark, LineVertexMark):
            series.setdefault(mark.series_key or "", []).append(mark)
    for key in sorted(series):
        pts = " ".join(f"{_f(m.x)},{_f(m.y)}" for m in series[key])
        out.append(f'<polyline points="{pts}" fill="none" stroke="{series[key][0].color}" stroke-width="2"/>')

    for mark in scene.marks:
        if isinstance(mark, RectMark):
            out.append(f'<rect data-row="{mark.row_id}" x="{_f(mark.x)}" y="{_f(mark.y)}" '
                       f'width="{_f(mark.w)}" height="{_f(mark.h)}" fill="{mark.color}"/>')
        elif isinstance(mark, PointMark):
            out.append(f'<circle data-row="{mark.row_id}" cx="{_f(mark.cx)}" cy="{_f(mark.cy)}" '
                       f'r="{_f(mark.r)}" fill="{mark.color}"/>')
        elif isinstance(mark, LineVertexMark):
            out.append(f'<circle data-row="{mark.row_id}" cx="{_f(mark.x)}" cy="{_f(mark.y)}" '
                       f'r="3.00" fill="{mark.color}"/>')
        else:
            x1 = mark.cx + mark.r * math.cos(mark.start_angle)
            y1 = mark.cy + mark.r * math.sin(mark.start_angle)
            x2 = mark.cx + mark.r * math.cos(mark.end_angle)
            y2 = mark.cy + mark.r * math.sin(mark.end_angle)
            large = 1 if (mark.end_angle - mark.start_angle) > math.pi else 0
            out.append(f'<path data-row="{mark.row_id}" d="M {_f(mark.cx)} {_f(mark.cy)} L {_f(x1)} {_f(y1)} '
                       f'A {_f(mark.r)} {_f(mark.r)} 0 {large} 1 {_f(x2)} {_f(y2)} Z" '
                       f'fill="{mark.color}" stroke="#ffffff"/>')

    for entry in scene.legend:
        box = entry.label_box
        out.append(f'<rect x="{_f(box.x)}" y="{_f(box.y)}" width="{_f(box.w)}" height="{_f(box.h)}" '
                   f'fill="#ffffff" stroke="#cccccc"/>')
        out.append(f'<rect x="{_f(box.x + 2)}" y="{_f(box.y + 2)}" width="12.00" height="12.00" '
                   f'fill="{entry.color}"/>')
        out.append(f'<text x="{_f(box.x + 18)}" y="{_f(box.y + 12)}" font-family="sans-serif" '
                   f'font-size="10">{escape(entry.category)}</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"
