"""Sketch-driven selection and documentation of chart findings."""

from .chart import ChartClass, ChartSpec, classify_chart, parse_chart_spec
from .dataset import ColumnType, DataTable, infer_column_type, load_csv, load_table
from .facts import DataFact, compute_fact, detect_outliers, detect_trend, quartiles
from .intent import FactQuery, FactType, admissible_fact_types, expand_queries, parse_declarative_intent
from .layout import SceneGraph, Viewport, invert_x, layout_chart, render_svg, scene_to_dict
from .nlg import RefinerConfig, Sentence, compose_card, highlight_key_messages, realize_fact, refine
from .sketch import (
    PathKind,
    Scope,
    Selection,
    SketchPath,
    avg_min_distance,
    classify_path,
    point_in_polygon,
    resolve,
    resolve_closed,
    resolve_open_grouped,
    resolve_open_simple,
)

__version__ = "0.1.0"
