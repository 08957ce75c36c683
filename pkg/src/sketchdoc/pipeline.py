"""End-to-end orchestration: chart building and selection-to-cards runs.

Shared by the HTTP service and the CLI so both input methods (sketches and
declarative intents) travel the exact same fact path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .chart import ChartClass, ChartSpec, classify_chart, parse_chart_spec
from .dataset import DataTable
from .docstore import canonical_json
from .facts import DataFact, compute_fact
from .intent import expand_queries, parse_declarative_intent
from .layout import SceneGraph, Viewport, layout_chart
from .nlg import RefinerConfig, compose_card, realize_fact, refine
from .sketch import Point, Selection, SketchPath, resolve


@dataclass(frozen=True)
class ChartContext:
    table: DataTable
    spec: ChartSpec
    chart_class: ChartClass
    scene: SceneGraph
    viewport: Viewport


@dataclass(frozen=True)
class CardDraft:
    text: str
    spans: tuple
    key_messages: tuple
    scope_label: str
    facts: tuple[DataFact, ...]


def build_chart(chart_doc: dict, table: DataTable, viewport: Viewport = Viewport()) -> ChartContext:
    spec = parse_chart_spec(chart_doc, table)
    scene = layout_chart(spec, viewport)
    return ChartContext(table, spec, classify_chart(spec), scene, viewport)


def clamp_points(points: list[Point], viewport: Viewport) -> tuple[Point, ...]:
    return tuple(
        (min(max(float(x), 0.0), viewport.width), min(max(float(y), 0.0), viewport.height))
        for x, y in points
    )


def selection_for_sketch(ctx: ChartContext, points: list[Point]) -> Selection:
    path = SketchPath(clamp_points(points, ctx.viewport))
    return resolve(ctx.scene, path)


def selection_for_intent(ctx: ChartContext, intent_doc: dict) -> Selection:
    return parse_declarative_intent(intent_doc, ctx.table)


def cards_for_selection(ctx: ChartContext, sel: Selection,
                        refiner: RefinerConfig | None = None,
                        refine_client=None) -> tuple[list[CardDraft], bool]:
    """Compute facts and realize cards. Returns (drafts, grouped): a single
    item on a grouped chart yields one card per comparison scope, delivered
    as a pre-built group."""
    queries = expand_queries(sel, ctx.chart_class, ctx.spec)
    grouped = {q.mode for q in queries} == {"all", "same_category", "same_x"}
    drafts: list[CardDraft] = []
    if grouped:
        for query in queries:
            facts = compute_fact(query, ctx.table)
            drafts.append(_draft(facts, sel, query.scope_label))
    else:
        facts: list[DataFact] = []
        for query in queries:
            facts.extend(compute_fact(query, ctx.table))
        drafts.append(_draft(facts, sel, queries[0].scope_label))
    if refiner is not None and refiner.enabled:
        texts = refine([d.text for d in drafts], refiner,
                       fact_counts=[len(d.facts) for d in drafts], client=refine_client)
        drafts = [
            CardDraft(t, d.spans, d.key_messages, d.scope_label, d.facts) if t == d.text
            else _rehighlight(d, t)
            for d, t in zip(drafts, texts)
        ]
    return drafts, grouped


def _draft(facts: list[DataFact], sel: Selection, scope_label: str) -> CardDraft:
    sentences = [realize_fact(f, f"f{i + 1}") for i, f in enumerate(facts)]
    if not sentences:
        from .errors import NoAdmissibleFacts

        raise NoAdmissibleFacts("selection yields no reportable facts")
    card = compose_card(sentences, sel)
    return CardDraft(card.text, card.spans, card.key_messages, scope_label, tuple(facts))


def _rehighlight(draft: CardDraft, new_text: str) -> CardDraft:
    from .nlg import match_spans

    spans, _ = match_spans(new_text, draft.key_messages)
    return CardDraft(new_text, spans, draft.key_messages, draft.scope_label, draft.facts)


def facts_payload(sel: Selection, drafts: list[CardDraft]) -> dict:
    """Stable JSON form of a selection's facts (the byte-comparable artifact)."""
    return {
        "selection": sel.to_dict(),
        "cards": [
            {
                "scopeLabel": d.scope_label,
                "text": d.text,
                "facts": [f.to_dict() for f in d.facts],
            }
            for d in drafts
        ],
    }


def facts_json(sel: Selection, drafts: list[CardDraft]) -> str:
    return canonical_json(facts_payload(sel, drafts))
