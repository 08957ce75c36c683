import math

import pytest

from sketchdoc.dataset import load_table
from sketchdoc.pipeline import build_chart

#: (year, action count, drama count) — constructed so 2006 contrast is 4x,
#: 2010 differs by 1, 2007 is the Action maximum, Drama falls monotonically
MOVIES = [
    (2006, 20, 80),
    (2007, 35, 70),
    (2008, 28, 55),
    (2009, 30, 40),
    (2010, 26, 25),
]


def movies_records():
    records = []
    for year, action, drama in MOVIES:
        records.append({"Year": year, "Genre": "Action", "Count": action})
        records.append({"Year": year, "Genre": "Drama", "Count": drama})
    return records


MOVIES_CHART = {
    "mark": "bar",
    "encoding": {"x": {"field": "Year"}, "y": {"field": "Count"}, "color": {"field": "Genre"}},
    "title": "Movies released by genre",
}


@pytest.fixture(scope="session")
def movies_table():
    return load_table(movies_records())


@pytest.fixture(scope="session")
def movies_ctx(movies_table):
    return build_chart(MOVIES_CHART, movies_table)


@pytest.fixture(scope="session")
def scatter_ctx():
    table = load_table([
        {"Horsepower": hp, "MPG": mpg}
        for hp, mpg in [(60, 38), (80, 32), (95, 30), (110, 26), (130, 21), (150, 18), (170, 15)]
    ])
    doc = {"mark": "point", "encoding": {"x": {"field": "Horsepower"}, "y": {"field": "MPG"}}}
    return build_chart(doc, table)


@pytest.fixture(scope="session")
def line_ctx():
    table = load_table([
        {"Year": 2000 + i, "Sales": v}
        for i, v in enumerate([12, 15, 19, 17, 22, 25, 24])
    ])
    doc = {"mark": "line", "encoding": {"x": {"field": "Year"}, "y": {"field": "Sales"}}}
    return build_chart(doc, table)


@pytest.fixture(scope="session")
def pie_ctx():
    table = load_table([
        {"Segment": s, "Share": v} for s, v in [("North", 50), ("South", 30), ("West", 20)]
    ])
    doc = {"mark": "arc", "encoding": {"x": {"field": "Segment"}, "y": {"field": "Share"}}}
    return build_chart(doc, table)


def bar_mark(ctx, year, genre):
    for m in ctx.scene.marks:
        if m.series_key == genre and ctx.table.value("Year", m.row_id) == year:
            return m
    raise AssertionError(f"no bar for {year}/{genre}")


def circle_points(cx, cy, r, n=40, close=True):
    pts = [
        (cx + r * math.cos(2 * math.pi * k / n), cy + r * math.sin(2 * math.pi * k / n))
        for k in range(n)
    ]
    if close:
        pts.append(pts[0])
    return pts


def rect_polygon(x0, y0, x1, y1):
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)]


def trace_tops(ctx, genre, dy=-6.0):
    marks = sorted((m for m in ctx.scene.marks if m.series_key == genre), key=lambda m: m.x)
    return [(m.x + m.w / 2, m.y + dy) for m in marks]


def lasso_band(ctx, year, pad=4.0):
    """Rectangle lasso around every bar of one x band."""
    bars = [m for m in ctx.scene.marks if ctx.table.value("Year", m.row_id) == year]
    x0 = min(m.x for m in bars) - pad
    x1 = max(m.x + m.w for m in bars) + pad
    return rect_polygon(x0, ctx.viewport.plot_top - 10, x1, ctx.viewport.plot_bottom + 10)
