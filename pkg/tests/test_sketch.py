import math
import random

import pytest

from sketchdoc.errors import EmptySelection, OpenPathOnPie, TooShort
from sketchdoc.sketch import (
    PathKind,
    Scope,
    SketchPath,
    avg_min_distance,
    classify_path,
    point_in_polygon,
    resolve,
    resolve_closed,
    resolve_open_grouped,
    resolve_open_simple,
)

from conftest import bar_mark, circle_points, rect_polygon, trace_tops


# -- oracles -------------------------------------------------------------------

def winding_number_inside(p, polygon):
    """Independent containment oracle: winding number, boundary inclusive."""
    def on_segment(q, a, b):
        cross = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])
        if abs(cross) > 1e-9 * (1 + abs(b[0] - a[0]) + abs(b[1] - a[1])):
            return False
        dot = (q[0] - a[0]) * (b[0] - a[0]) + (q[1] - a[1]) * (b[1] - a[1])
        return -1e-12 <= dot <= (b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2 + 1e-12

    winding = 0
    n = len(polygon)
    for i in range(n):
        a, b = polygon[i], polygon[(i + 1) % n]
        if on_segment(p, a, b):
            return True
        if a[1] <= p[1]:
            if b[1] > p[1] and _is_left(a, b, p) > 0:
                winding += 1
        elif b[1] <= p[1] and _is_left(a, b, p) < 0:
            winding -= 1
    return winding != 0


def _is_left(a, b, p):
    return (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])


def brute_avg_min_distance(anchors, polyline):
    def seg_dist(p, a, b):
        vx, vy = b[0] - a[0], b[1] - a[1]
        L2 = vx * vx + vy * vy
        if L2 == 0:
            return math.dist(p, a)
        t = ((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / L2
        t = max(0.0, min(1.0, t))
        return math.dist(p, (a[0] + t * vx, a[1] + t * vy))

    total = 0.0
    for p in anchors:
        total += min(seg_dist(p, polyline[i], polyline[i + 1]) for i in range(len(polyline) - 1))
    return total / len(anchors)


def random_simple_polygon(rng, n=8, cx=0.0, cy=0.0, scale=50.0):
    """Star-shaped (hence simple) polygon around a center point."""
    angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
    return [(cx + rng.uniform(0.3, 1.0) * scale * math.cos(a),
             cy + rng.uniform(0.3, 1.0) * scale * math.sin(a)) for a in angles]


# -- classify ------------------------------------------------------------------

def test_identical_endpoints_close_the_path():
    pts = circle_points(100, 100, 30)
    assert classify_path(pts) is PathKind.CLOSED


def test_long_straight_stroke_is_open():
    assert classify_path([(0, 0), (300, 0)]) is PathKind.OPEN


def test_threshold_formula_gap_10_arc_200():
    # out-and-back stroke: arc length just over 200, endpoint gap 10
    pts = [(0, 0), (100, 0), (100, 2), (0, 10)]
    length = sum(math.dist(pts[i], pts[i + 1]) for i in range(len(pts) - 1))
    gap = math.dist(pts[0], pts[-1])
    assert length > 200 and gap == 10.0
    assert gap <= max(12.0, 0.1 * length)  # 10 <= max(12, ~20)
    assert classify_path(pts) is PathKind.CLOSED


def test_tap_raises_too_short():
    with pytest.raises(TooShort):
        classify_path([(10, 10), (12, 11)])


# -- point in polygon ------------------------------------------------------------

UNIT_SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def test_point_in_unit_square():
    assert point_in_polygon((0.5, 0.5), UNIT_SQUARE)


def test_point_outside_unit_square():
    assert not point_in_polygon((2, 2), UNIT_SQUARE)


def test_point_on_edge_counts_inside():
    assert point_in_polygon((0.5, 0.0), UNIT_SQUARE)
    assert point_in_polygon((1.0, 0.5), UNIT_SQUARE)


def test_point_in_polygon_matches_winding_oracle():
    rng = random.Random(42)
    for _ in range(300):
        poly = random_simple_polygon(rng, n=rng.randint(3, 12))
        p = (rng.uniform(-60, 60), rng.uniform(-60, 60))
        assert point_in_polygon(p, poly) == winding_number_inside(p, poly)


# -- avg_min_distance -------------------------------------------------------------

def test_anchors_on_polyline_have_zero_distance():
    line = [(0.0, 0.0), (10.0, 0.0), (20.0, 5.0)]
    assert avg_min_distance([(5.0, 0.0), (10.0, 0.0)], line) == pytest.approx(0.0, abs=1e-12)


def test_single_anchor_perpendicular_drop():
    assert avg_min_distance([(0.0, 10.0)], [(-5.0, 0.0), (5.0, 0.0)]) == pytest.approx(10.0)


def test_two_anchor_mean():
    # derived with the brute-force segment-distance oracle: mean(3, 5) = 4
    anchors = [(0.0, 3.0), (10.0, 5.0)]
    line = [(0.0, 0.0), (10.0, 0.0)]
    assert brute_avg_min_distance(anchors, line) == pytest.approx(4.0)
    assert avg_min_distance(anchors, line) == pytest.approx(4.0, abs=1e-12)


def test_avg_min_distance_matches_brute_force():
    rng = random.Random(11)
    for _ in range(200):
        anchors = [(rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(rng.randint(1, 10))]
        line = [(rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(rng.randint(2, 12))]
        assert avg_min_distance(anchors, line) == pytest.approx(
            brute_avg_min_distance(anchors, line), abs=1e-9)


def test_avg_min_distance_rigid_transform_invariant():
    rng = random.Random(3)
    anchors = [(rng.uniform(0, 50), rng.uniform(0, 50)) for _ in range(5)]
    line = [(rng.uniform(0, 50), rng.uniform(0, 50)) for _ in range(6)]
    base = avg_min_distance(anchors, line)
    theta, dx, dy = 0.7, 12.0, -8.0

    def rot(p):
        return (p[0] * math.cos(theta) - p[1] * math.sin(theta) + dx,
                p[0] * math.sin(theta) + p[1] * math.cos(theta) + dy)

    assert avg_min_distance([rot(p) for p in anchors], [rot(p) for p in line]) == pytest.approx(
        base, abs=1e-6)


# -- closed resolution -------------------------------------------------------------

def test_lasso_single_bar(movies_ctx):
    mark = bar_mark(movies_ctx, 2007, "Action")
    sel = resolve_closed(movies_ctx.scene, SketchPath(tuple(
        circle_points(mark.x + mark.w / 2, mark.y, 15))))
    assert sel.scope is Scope.ITEMS
    assert sel.row_ids == {mark.row_id}


def test_lasso_legend_selects_category(movies_ctx):
    entry = next(e for e in movies_ctx.scene.legend if e.category == "Drama")
    box = entry.label_box
    poly = rect_polygon(box.x - 3, box.y - 3, box.x + box.w + 3, box.y + box.h + 3)
    sel = resolve_closed(movies_ctx.scene, SketchPath(tuple(poly)))
    assert sel.scope is Scope.LEGEND_CATEGORY
    assert sel.legend_categories == {"Drama"}
    assert len(sel.row_ids) == 5
    assert all(movies_ctx.table.value("Genre", r) == "Drama" for r in sel.row_ids)


def test_lasso_empty_corner(movies_ctx):
    vp = movies_ctx.viewport
    poly = rect_polygon(vp.plot_left + 2, vp.plot_top + 2, vp.plot_left + 20, vp.plot_top + 20)
    with pytest.raises(EmptySelection):
        resolve_closed(movies_ctx.scene, SketchPath(tuple(poly)))


def test_marks_win_over_legend(movies_ctx):
    # a lasso spanning both a legend box and the tall 2006 Drama bar selects the bar
    mark = bar_mark(movies_ctx, 2006, "Drama")
    entry = movies_ctx.scene.legend[0]
    poly = rect_polygon(mark.x - 2, mark.y - 2,
                        entry.label_box.x + entry.label_box.w + 2,
                        entry.label_box.y + entry.label_box.h + 2)
    sel = resolve_closed(movies_ctx.scene, SketchPath(tuple(poly)))
    assert sel.scope is Scope.ITEMS
    assert mark.row_id in sel.row_ids


def test_lasso_vertex_inside_bar_counts(movies_ctx):
    # small lasso fully inside the tall Drama bar: polygon vertices in rect
    mark = bar_mark(movies_ctx, 2006, "Drama")
    cx = mark.x + mark.w / 2
    cy = mark.y + mark.h / 2
    sel = resolve_closed(movies_ctx.scene, SketchPath(tuple(circle_points(cx, cy, 8))))
    assert sel.row_ids == {mark.row_id}


def test_lasso_inside_pie_slice(pie_ctx):
    mark = pie_ctx.scene.marks[0]
    mid = (mark.start_angle + mark.end_angle) / 2
    cx = mark.cx + mark.r * 0.5 * math.cos(mid)
    cy = mark.cy + mark.r * 0.5 * math.sin(mid)
    sel = resolve_closed(pie_ctx.scene, SketchPath(tuple(circle_points(cx, cy, 10))))
    assert mark.row_id in sel.row_ids


# -- open resolution on simple charts ------------------------------------------------

def test_open_full_range_on_line(line_ctx):
    vp = line_ctx.viewport
    # stroke overshoots the plot on both sides; range clamps to the full axis
    stroke = SketchPath(((vp.plot_left - 30, 200.0), (vp.plot_right + 30, 200.0)))
    sel = resolve_open_simple(line_ctx.scene, stroke)
    assert sel.scope is Scope.RANGE
    assert len(sel.row_ids) == line_ctx.table.row_count


def test_open_full_range_on_simple_bar():
    from sketchdoc.dataset import load_table
    from sketchdoc.pipeline import build_chart

    table = load_table([{"Year": 2006 + i, "Count": 10 + i} for i in range(5)])
    doc = {"mark": "bar", "encoding": {"x": {"field": "Year"}, "y": {"field": "Count"}}}
    ctx = build_chart(doc, table)
    first = min(ctx.scene.marks, key=lambda m: m.x)
    last = max(ctx.scene.marks, key=lambda m: m.x)
    stroke = SketchPath(((first.x + 1, 100.0), (last.x + last.w - 1, 150.0)))
    sel = resolve_open_simple(ctx.scene, stroke)
    assert len(sel.row_ids) == 5
    assert sel.range == (2006, 2010)


def test_open_partial_range_matches_inversion(line_ctx):
    # stroke spanning the pixels of 2002..2004 selects exactly those rows
    marks = sorted(line_ctx.scene.marks, key=lambda m: m.x)
    stroke = SketchPath(((marks[2].x - 1, 100.0), (marks[4].x + 1, 120.0)))
    sel = resolve_open_simple(line_ctx.scene, stroke)
    years = sorted(line_ctx.table.value("Year", r) for r in sel.row_ids)
    assert years == [2002, 2003, 2004]


def test_open_path_on_pie_rejected(pie_ctx):
    vp = pie_ctx.viewport
    stroke = SketchPath(((vp.plot_left + 5, 200.0), (vp.plot_right - 5, 200.0)))
    with pytest.raises(OpenPathOnPie):
        resolve_open_simple(pie_ctx.scene, stroke)


# -- open resolution on grouped charts -----------------------------------------------

def test_trace_drama_tops_selects_drama(movies_ctx):
    sel = resolve_open_grouped(movies_ctx.scene, SketchPath(tuple(trace_tops(movies_ctx, "Drama"))))
    assert sel.scope is Scope.GROUP
    assert sel.group == "Drama"
    assert len(sel.row_ids) == 5
    assert not sel.tie


def test_exact_vertex_trace_has_zero_distance(movies_ctx):
    pts = trace_tops(movies_ctx, "Action", dy=0.0)
    sel = resolve_open_grouped(movies_ctx.scene, SketchPath(tuple(pts)))
    assert sel.group == "Action"


def test_equidistant_stroke_sets_tie_flag():
    from sketchdoc.dataset import load_table
    from sketchdoc.pipeline import build_chart

    table = load_table([
        {"Year": 2000 + i, "Series": s, "V": v}
        for i in range(5)
        for s, v in [("A", 10), ("B", 30)]
    ])
    doc = {"mark": "line", "encoding": {"x": {"field": "Year"}, "y": {"field": "V"},
                                        "color": {"field": "Series"}}}
    ctx = build_chart(doc, table)
    a_marks = sorted((m for m in ctx.scene.marks if m.series_key == "A"), key=lambda m: m.x)
    b_marks = sorted((m for m in ctx.scene.marks if m.series_key == "B"), key=lambda m: m.x)
    midline = [((a.x + b.x) / 2, (a.y + b.y) / 2) for a, b in zip(a_marks, b_marks)]
    sel = resolve_open_grouped(ctx.scene, SketchPath(tuple(midline)))
    assert sel.tie
    assert sel.group == "A"  # lexicographic tie-break


def test_chosen_group_distance_is_minimal(movies_ctx):
    stroke = trace_tops(movies_ctx, "Drama", dy=-10.0)
    sel = resolve_open_grouped(movies_ctx.scene, SketchPath(tuple(stroke)))
    by_group = {}
    for m in movies_ctx.scene.marks:
        by_group.setdefault(m.series_key, []).append((m.x + m.w / 2, m.y))
    dists = {g: brute_avg_min_distance(pts, stroke) for g, pts in by_group.items()}
    assert dists[sel.group] == min(dists.values())


# -- invariances -----------------------------------------------------------------

def test_selection_invariant_under_stroke_reversal(movies_ctx):
    pts = trace_tops(movies_ctx, "Drama")
    fwd = resolve(movies_ctx.scene, SketchPath(tuple(pts)))
    rev = resolve(movies_ctx.scene, SketchPath(tuple(reversed(pts))))
    assert fwd.row_ids == rev.row_ids and fwd.group == rev.group

    mark = bar_mark(movies_ctx, 2007, "Action")
    circle = circle_points(mark.x + mark.w / 2, mark.y, 15)
    fwd = resolve(movies_ctx.scene, SketchPath(tuple(circle)))
    rev = resolve(movies_ctx.scene, SketchPath(tuple(reversed(circle))))
    assert fwd.row_ids == rev.row_ids


def test_lasso_stable_under_small_translation(movies_ctx):
    mark = bar_mark(movies_ctx, 2007, "Action")
    base = circle_points(mark.x + mark.w / 2, mark.y, 14)
    want = resolve_closed(movies_ctx.scene, SketchPath(tuple(base))).row_ids
    rng = random.Random(5)
    for _ in range(25):
        eps = 1.5  # less than half the 5px gap between grouped bars
        dx, dy = rng.uniform(-eps, eps), rng.uniform(-eps, eps)
        moved = [(x + dx, y + dy) for x, y in base]
        assert resolve_closed(movies_ctx.scene, SketchPath(tuple(moved))).row_ids == want
