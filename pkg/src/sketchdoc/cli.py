"""Batch front-end and service launcher.

``sketchdoc document`` replays recorded sketch strokes or declarative
intents against a chart and writes the findings (markdown or JSON) plus
the rendered SVG. ``sketchdoc serve`` starts the HTTP service.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import docstore
from .dataset import read_table
from .docstore import DocumentationCard, Session
from .errors import CONFLICT_ERRORS, EngineError, VALIDATION_ERRORS
from .layout import PALETTE, Viewport, render_svg
from .nlg import RefinerConfig
from .pipeline import (
    build_chart,
    cards_for_selection,
    clamp_points,
    facts_payload,
    selection_for_intent,
    selection_for_sketch,
)

EXIT_VALIDATION = 2
EXIT_EMPTY_SELECTION = 3

ENV_REFINER_ENDPOINT = "SKETCHDOC_REFINER_ENDPOINT"
ENV_REFINER_KEY = "SKETCHDOC_REFINER_KEY"


def _refiner_from_env(enabled: bool) -> RefinerConfig:
    endpoint = os.environ.get(ENV_REFINER_ENDPOINT, "")
    key = os.environ.get(ENV_REFINER_KEY, "")
    return RefinerConfig(enabled=enabled, endpoint=endpoint, api_key=key)


@click.group()
def main():
    """Document chart findings from sketches or declarative intents."""


@main.command()
@click.option("--chart", "chart_path", required=True, type=click.Path(), help="chart spec JSON")
@click.option("--data", "data_path", type=click.Path(), help="data table (CSV or JSON records)")
@click.option("--sketches", "sketches_path", type=click.Path(), help="recorded strokes JSON")
@click.option("--intents", "intents_path", type=click.Path(), help="declarative intents JSON")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="output directory")
@click.option("--format", "fmt", type=click.Choice(["markdown", "json"]), default="markdown")
@click.option("--refine", is_flag=True, help="polish/merge card text via the completion service")
@click.option("--width", type=float, default=640.0)
@click.option("--height", type=float, default=400.0)
def document(chart_path, data_path, sketches_path, intents_path, out_dir, fmt, refine, width, height):
    """Generate documentation for a chart from recorded inputs."""
    if bool(sketches_path) == bool(intents_path):
        click.echo("error: provide exactly one of --sketches or --intents", err=True)
        sys.exit(EXIT_VALIDATION)
    try:
        chart_doc = json.loads(Path(chart_path).read_text(encoding="utf-8"))
        if data_path:
            table = read_table(data_path)
        elif isinstance(chart_doc.get("data"), dict) and "values" in chart_doc["data"]:
            from .dataset import load_table

            table = load_table(chart_doc["data"]["values"])
        else:
            click.echo("error: no --data given and the chart spec has no inline data", err=True)
            sys.exit(EXIT_VALIDATION)
        viewport = Viewport(width=width, height=height)
        ctx = build_chart(chart_doc, table, viewport)
        refiner = _refiner_from_env(refine)

        inputs_path = sketches_path or intents_path
        inputs = json.loads(Path(inputs_path).read_text(encoding="utf-8"))
        if not isinstance(inputs, list):
            inputs = [inputs]

        session = Session(id="cli", chart_doc=chart_doc, table=table, viewport=viewport)
        documents = []
        for doc in inputs:
            if sketches_path:
                points = clamp_points([(p[0], p[1]) for p in doc["points"]], viewport)
                sel = selection_for_sketch(ctx, list(points))
            else:
                sel = selection_for_intent(ctx, doc)
            drafts, grouped = cards_for_selection(ctx, sel, refiner)
            documents.append(facts_payload(sel, drafts))
            color = PALETTE[session.counters["sketch"] % len(PALETTE)]
            sketch_id = None
            if sketches_path:
                from .docstore import SketchRecord

                sketch_id = session.next_id("sketch")
                session.sketches.append(SketchRecord(sketch_id, color, tuple(points)))
            cards = []
            for draft in drafts:
                cards.append(DocumentationCard(
                    id=session.next_id("card"),
                    sketch_id=sketch_id,
                    color=color,
                    text=draft.text,
                    spans=draft.spans,
                    key_messages=draft.key_messages,
                    scope_label=draft.scope_label,
                    facts=tuple({"id": f"f{i + 1}", **f.to_dict()} for i, f in enumerate(draft.facts)),
                    created_at=session.tick(),
                ))
            for card in reversed(cards):
                docstore.insert_card(session, card)
            if grouped and len(cards) > 1:
                docstore.group_cards(session, [c.id for c in cards])

        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "chart.svg").write_text(render_svg(ctx.scene), encoding="utf-8")
        if fmt == "markdown":
            (out / "findings.md").write_text(docstore.export_markdown(session), encoding="utf-8")
        else:
            payload = {"chart": {"title": session.title}, "documents": documents}
            (out / "findings.json").write_text(docstore.canonical_json(payload), encoding="utf-8")
        click.echo(f"wrote {out / 'chart.svg'} and findings.{ 'md' if fmt == 'markdown' else 'json' }")
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except VALIDATION_ERRORS as exc:
        click.echo(f"error [{exc.code}]: {exc.message}", err=True)
        sys.exit(EXIT_VALIDATION)
    except CONFLICT_ERRORS as exc:
        click.echo(f"error [{exc.code}]: {exc.message}", err=True)
        sys.exit(EXIT_EMPTY_SELECTION)
    except EngineError as exc:
        click.echo(f"error [{exc.code}]: {exc.message}", err=True)
        sys.exit(EXIT_VALIDATION)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8400)
@click.option("--session-dir", type=click.Path(), default=None, help="directory for session files")
@click.option("--ui-dir", type=click.Path(), default=None, help="static UI bundle to serve at /ui")
@click.option("--refine", is_flag=True, help="enable card refinement via the completion service")
def serve(host, port, session_dir, ui_dir, refine):
    """Run the HTTP service."""
    import uvicorn

    from .service import SessionStore, create_app

    app = create_app(SessionStore(session_dir), _refiner_from_env(refine), ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
