"""Sketch identification: classify strokes and resolve them to selected data.

A stroke is Closed when its endpoints (nearly) meet; closed paths lasso
marks or legend labels, open paths express an x range on simple charts or
pick the spatially closest category group on grouped charts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .chart import ChartClass, is_complex
from .dataset import Cell, cell_to_json
from .errors import EmptySelection, OpenPathOnPie, TooShort
from .layout import (
    ArcSliceMark,
    BandScale,
    LineVertexMark,
    Mark,
    PointMark,
    RectMark,
    SceneGraph,
    invert_x,
    mark_anchor,
)

#: a gap up to max(CLOSE_GAP_PX, CLOSE_GAP_RATIO * arc length) closes the path
CLOSE_GAP_PX = 12.0
CLOSE_GAP_RATIO = 0.1
MIN_ARC_LENGTH = 8.0
ARC_BOUNDARY_SAMPLES = 16
EPS = 1e-9

Point = tuple[float, float]


class PathKind(Enum):
    CLOSED = "closed"
    OPEN = "open"


class Scope(Enum):
    ITEMS = "items"
    RANGE = "range"
    GROUP = "group"
    LEGEND_CATEGORY = "legend_category"


@dataclass(frozen=True)
class SketchPath:
    points: tuple[Point, ...]
    id: str = ""
    color: str = ""

    def __post_init__(self):
        deduped: list[Point] = []
        for p in self.points:
            q = (float(p[0]), float(p[1]))
            if not deduped or deduped[-1] != q:
                deduped.append(q)
        object.__setattr__(self, "points", tuple(deduped))


@dataclass(frozen=True)
class Selection:
    kind: PathKind
    row_ids: frozenset[int]
    scope: Scope
    range: tuple[Cell, Cell] | None = None
    group: str | None = None
    legend_categories: frozenset[str] = frozenset()
    tie: bool = False

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "scope": self.scope.value,
            "rowIds": sorted(self.row_ids),
            "range": [cell_to_json(v) for v in self.range] if self.range else None,
            "group": self.group,
            "legendCategories": sorted(self.legend_categories),
            "tie": self.tie,
        }


# -- primitive geometry ------------------------------------------------------

def arc_length(points: tuple[Point, ...]) -> float:
    return sum(math.dist(points[i], points[i + 1]) for i in range(len(points) - 1))


def classify_path(points: tuple[Point, ...] | list[Point]) -> PathKind:
    """Closed iff the endpoint gap is within max(12 px, 10% of arc length)."""
    pts = SketchPath(tuple(points)).points
    if len(pts) < 2:
        raise TooShort("stroke needs at least 2 distinct points")
    length = arc_length(pts)
    if length < MIN_ARC_LENGTH:
        raise TooShort(f"stroke arc length {length:.1f}px looks like an accidental tap")
    gap = math.dist(pts[0], pts[-1])
    return PathKind.CLOSED if gap <= max(CLOSE_GAP_PX, CLOSE_GAP_RATIO * length) else PathKind.OPEN


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 == 0:
        return math.dist(p, a)
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / seg2))
    return math.dist(p, (ax + t * dx, ay + t * dy))


def point_in_polygon(p: Point, polygon: list[Point] | tuple[Point, ...]) -> bool:
    """Even-odd (ray casting) containment; boundary points count as inside."""
    n = len(polygon)
    x, y = p
    for i in range(n):
        if point_segment_distance(p, polygon[i], polygon[(i + 1) % n]) <= EPS:
            return True
    inside = False
    j = n - 1
    for i in range(n):
        xi, yi = polygon[i]
        xj, yj = polygon[j]
        if (yi > y) != (yj > y):
            x_cross = xi + (y - yi) * (xj - xi) / (yj - yi)
            if x < x_cross:
                inside = not inside
        j = i
    return inside


def avg_min_distance(anchors: list[Point], polyline: list[Point] | tuple[Point, ...]) -> float:
    """Mean over anchors of the shortest distance to any polyline segment."""
    pts = np.asarray(polyline, dtype=float)
    a = pts[:-1]
    b = pts[1:]
    ab = b - a
    seg2 = np.einsum("ij,ij->i", ab, ab)
    seg2_safe = np.where(seg2 > 0, seg2, 1.0)
    anchor_arr = np.asarray(anchors, dtype=float)
    ap = anchor_arr[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("mij,ij->mi", ap, ab) / seg2_safe, 0.0, 1.0)
    closest = ap - t[:, :, None] * ab[None, :, :]
    dists = np.sqrt(np.einsum("mij,mij->mi", closest, closest))
    return float(dists.min(axis=1).mean())


def _orient(a: Point, b: Point, c: Point) -> int:
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if abs(v) <= EPS:
        return 0
    return 1 if v > 0 else -1


def _on_segment(a: Point, b: Point, q: Point) -> bool:
    return (min(a[0], b[0]) - EPS <= q[0] <= max(a[0], b[0]) + EPS
            and min(a[1], b[1]) - EPS <= q[1] <= max(a[1], b[1]) + EPS)


def segments_intersect(p1: Point, p2: Point, p3: Point, p4: Point) -> bool:
    o1, o2 = _orient(p1, p2, p3), _orient(p1, p2, p4)
    o3, o4 = _orient(p3, p4, p1), _orient(p3, p4, p2)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and _on_segment(p1, p2, p3):
        return True
    if o2 == 0 and _on_segment(p1, p2, p4):
        return True
    if o3 == 0 and _on_segment(p3, p4, p1):
        return True
    if o4 == 0 and _on_segment(p3, p4, p2):
        return True
    return False


def _polygon_edges(polygon: tuple[Point, ...]):
    n = len(polygon)
    for i in range(n):
        yield polygon[i], polygon[(i + 1) % n]


def _rect_hit(polygon: tuple[Point, ...], x: float, y: float, w: float, h: float) -> bool:
    corners = [(x, y), (x + w, y), (x + w, y + h), (x, y + h)]
    if any(point_in_polygon(c, polygon) for c in corners):
        return True
    for vx, vy in polygon:
        if x - EPS <= vx <= x + w + EPS and y - EPS <= vy <= y + h + EPS:
            return True
    rect_edges = list(zip(corners, corners[1:] + corners[:1]))
    for a, b in _polygon_edges(polygon):
        for c, d in rect_edges:
            if segments_intersect(a, b, c, d):
                return True
    return False


def _circle_hit(polygon: tuple[Point, ...], cx: float, cy: float, r: float) -> bool:
    if point_in_polygon((cx, cy), polygon):
        return True
    return any(point_segment_distance((cx, cy), a, b) <= r for a, b in _polygon_edges(polygon))


def _slice_boundary_samples(mark: ArcSliceMark) -> list[Point]:
    # 16 samples around the slice boundary: centre, both radii, and the arc
    samples: list[Point] = [(mark.cx, mark.cy)]
    for t in (1 / 3, 2 / 3, 1.0):
        samples.append((mark.cx + mark.r * t * math.cos(mark.start_angle),
                        mark.cy + mark.r * t * math.sin(mark.start_angle)))
        samples.append((mark.cx + mark.r * t * math.cos(mark.end_angle),
                        mark.cy + mark.r * t * math.sin(mark.end_angle)))
    for k in range(1, ARC_BOUNDARY_SAMPLES - 6):
        theta = mark.start_angle + (mark.end_angle - mark.start_angle) * k / (ARC_BOUNDARY_SAMPLES - 6)
        samples.append((mark.cx + mark.r * math.cos(theta), mark.cy + mark.r * math.sin(theta)))
    return samples[:ARC_BOUNDARY_SAMPLES]


def _point_in_slice(p: Point, mark: ArcSliceMark) -> bool:
    dx, dy = p[0] - mark.cx, p[1] - mark.cy
    if math.hypot(dx, dy) > mark.r + EPS:
        return False
    theta = math.atan2(dy, dx)
    span = mark.end_angle - mark.start_angle
    rel = (theta - mark.start_angle) % (2 * math.pi)
    return rel <= span + EPS


def _slice_hit(polygon: tuple[Point, ...], mark: ArcSliceMark) -> bool:
    if any(point_in_polygon(s, polygon) for s in _slice_boundary_samples(mark)):
        return True
    return any(_point_in_slice(v, mark) for v in polygon)


def mark_hit_by_polygon(mark: Mark, polygon: tuple[Point, ...]) -> bool:
    if isinstance(mark, RectMark):
        return _rect_hit(polygon, mark.x, mark.y, mark.w, mark.h)
    if isinstance(mark, PointMark):
        return _circle_hit(polygon, mark.cx, mark.cy, mark.r)
    if isinstance(mark, LineVertexMark):
        return point_in_polygon((mark.x, mark.y), polygon)
    return _slice_hit(polygon, mark)


# -- resolution --------------------------------------------------------------

def resolve_closed(scene: SceneGraph, path: SketchPath) -> Selection:
    """Lasso selection: marks within/intersecting the polygon; legend labels
    select whole categories when only legend boxes are hit."""
    polygon = path.points
    if len(polygon) < 3:
        raise EmptySelection("closed path is degenerate")
    hit_rows = {m.row_id for m in scene.marks if mark_hit_by_polygon(m, polygon)}
    if hit_rows:
        return Selection(PathKind.CLOSED, frozenset(hit_rows), Scope.ITEMS)
    hit_cats = {
        e.category
        for e in scene.legend
        if _rect_hit(polygon, e.label_box.x, e.label_box.y, e.label_box.w, e.label_box.h)
    }
    if hit_cats:
        rows = {m.row_id for m in scene.marks if m.series_key in hit_cats}
        if rows:
            return Selection(PathKind.CLOSED, frozenset(rows), Scope.LEGEND_CATEGORY,
                             legend_categories=frozenset(hit_cats))
    raise EmptySelection("no marks or legend labels inside the sketch")


def _stroke_x_interval(scene: SceneGraph, path: SketchPath) -> tuple[float, float]:
    vp = scene.viewport
    lo = max(min(p[0] for p in path.points), vp.plot_left)
    hi = min(max(p[0] for p in path.points), vp.plot_right)
    if lo > hi:
        raise EmptySelection("stroke lies outside the plot area")
    return lo, hi


def _rows_in_x_range(scene: SceneGraph, lo_px: float, hi_px: float) -> tuple[list[Mark], tuple[Cell, Cell]]:
    scale = scene.x_scale
    marks_in = []
    if isinstance(scale, BandScale):
        i_lo = scale.band_at(lo_px)
        i_hi = scale.band_at(hi_px)
        for m in scene.marks:
            idx = scale.band_at(min(max(mark_anchor(m)[0], scale.range[0]), scale.range[1]))
            if i_lo <= idx <= i_hi:
                marks_in.append(m)
        domain_range = (scale.domain[i_lo], scale.domain[i_hi])
    else:
        lo_v, hi_v = invert_x(scene, lo_px), invert_x(scene, hi_px)
        for m in scene.marks:
            v = invert_x(scene, min(max(mark_anchor(m)[0], scene.viewport.plot_left), scene.viewport.plot_right))
            if lo_v - EPS <= v <= hi_v + EPS:
                marks_in.append(m)
        domain_range = (lo_v, hi_v)
    return marks_in, domain_range


def resolve_open_simple(scene: SceneGraph, path: SketchPath) -> Selection:
    """Open stroke on a simple chart selects the x range it spans."""
    if scene.chart_class is ChartClass.PIE:
        raise OpenPathOnPie("pies have no x range; use a closed path")
    lo_px, hi_px = _stroke_x_interval(scene, path)
    marks_in, domain_range = _rows_in_x_range(scene, lo_px, hi_px)
    if not marks_in:
        raise EmptySelection("no data items in the sketched range")
    return Selection(PathKind.OPEN, frozenset(m.row_id for m in marks_in), Scope.RANGE, range=domain_range)


def resolve_open_grouped(scene: SceneGraph, path: SketchPath, *, use_full_group: bool = False) -> Selection:
    """Open stroke on a grouped chart picks the category group whose marks
    track the stroke most closely (mean of per-anchor shortest distances)."""
    lo_px, hi_px = _stroke_x_interval(scene, path)
    marks_in, domain_range = _rows_in_x_range(scene, lo_px, hi_px)
    pool = list(scene.marks) if use_full_group else marks_in
    groups: dict[str, list[Mark]] = {}
    for m in pool:
        if m.series_key is not None:
            groups.setdefault(m.series_key, []).append(m)
    if not groups:
        raise EmptySelection("no data items in the sketched range")
    best: str | None = None
    best_avg = math.inf
    tie = False
    for cat in sorted(groups):
        avg = avg_min_distance([mark_anchor(m) for m in groups[cat]], path.points)
        if avg < best_avg - EPS:
            best, best_avg, tie = cat, avg, False
        elif abs(avg - best_avg) <= EPS:
            tie = True
    rows = frozenset(m.row_id for m in marks_in if m.series_key == best)
    if not rows:
        raise EmptySelection("matched group has no items in the sketched range")
    return Selection(PathKind.OPEN, rows, Scope.GROUP, range=domain_range, group=best, tie=tie)


def resolve(scene: SceneGraph, path: SketchPath) -> Selection:
    """Classify a stroke and resolve it against the scene."""
    kind = classify_path(path.points)
    if kind is PathKind.CLOSED:
        return resolve_closed(scene, path)
    if is_complex(scene.chart_class):
        return resolve_open_grouped(scene, path)
    return resolve_open_simple(scene, path)
