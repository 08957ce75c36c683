"""HTTP facade: session lifecycle, sketch submission, card operations, export.

Sessions are held in memory and mirrored to one JSON file each, so a store
pointed at the same directory survives restarts. All ids are sequential
counters, which keeps replayed request logs byte-reproducible.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from pydantic import BaseModel

from . import docstore
from .dataset import load_table
from .docstore import DocumentationCard, Session, SketchRecord
from .errors import EngineError, NOT_FOUND_ERRORS, UnknownSession, VALIDATION_ERRORS
from .layout import PALETTE, Viewport, render_svg, scene_to_dict
from .nlg import RefinerConfig
from .pipeline import ChartContext, build_chart, cards_for_selection, clamp_points
from .sketch import SketchPath, resolve


class SessionStore:
    """sessionId -> Session plus derived chart context, persisted per session."""

    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory else None
        self._sessions: dict[str, Session] = {}
        self._contexts: dict[str, ChartContext] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._store_lock = threading.Lock()
        self._counter = 0
        if self.directory:
            self.directory.mkdir(parents=True, exist_ok=True)
            for path in sorted(self.directory.glob("s*.json")):
                session = docstore.load_session(path)
                self._register(session)

    def _register(self, session: Session) -> None:
        self._sessions[session.id] = session
        self._locks[session.id] = threading.Lock()
        number = int(session.id[1:]) if session.id[1:].isdigit() else 0
        self._counter = max(self._counter, number)

    def create(self, chart_doc: dict, records: list[dict], viewport: Viewport) -> Session:
        table = load_table(records)
        build_chart(chart_doc, table, viewport)  # validate before allocating an id
        with self._store_lock:
            self._counter += 1
            session = Session(id=f"s{self._counter}", chart_doc=chart_doc, table=table, viewport=viewport)
            self._register(session)
        self.save(session)
        return session

    def get(self, session_id: str) -> Session:
        if session_id not in self._sessions:
            raise UnknownSession(f"no session {session_id!r}")
        return self._sessions[session_id]

    def context(self, session_id: str) -> ChartContext:
        session = self.get(session_id)
        if session_id not in self._contexts:
            self._contexts[session_id] = build_chart(session.chart_doc, session.table, session.viewport)
        return self._contexts[session_id]

    def lock(self, session_id: str) -> threading.Lock:
        return self._locks[session_id]

    def save(self, session: Session) -> None:
        if self.directory:
            docstore.save_session(session, self.directory / f"{session.id}.json")


class CreateSessionBody(BaseModel):
    chart: dict
    data: list[dict]
    viewport: dict | None = None


class SketchBody(BaseModel):
    points: list[list[float]]


class GroupBody(BaseModel):
    cardIds: list[str]


class EditBody(BaseModel):
    text: str


class MoveBody(BaseModel):
    nodeId: str
    index: int
    group: str | None = None


def _card_dict(card: DocumentationCard) -> dict:
    return {
        "id": card.id,
        "sketchId": card.sketch_id,
        "color": card.color,
        "text": card.text,
        "spans": [list(s) for s in card.spans],
        "scopeLabel": card.scope_label,
        "facts": list(card.facts),
        "createdAt": card.created_at,
        "edited": card.edited,
    }


def _tree_dict(session: Session) -> list[dict]:
    return [
        {"card": n.card_id} if isinstance(n, docstore.CardNode)
        else {"group": n.id, "cards": list(n.card_ids)}
        for n in session.tree
    ]


def _state(session: Session) -> dict:
    return {
        "sessionId": session.id,
        "version": session.version,
        "tree": _tree_dict(session),
        "cards": {cid: _card_dict(c) for cid, c in session.cards.items()},
        "sketches": [
            {"id": s.id, "color": s.color, "points": [list(p) for p in s.points]}
            for s in session.sketches
        ],
    }


def create_app(store: SessionStore | None = None,
               refiner: RefinerConfig | None = None,
               ui_dir: str | Path | None = None) -> FastAPI:
    store = store or SessionStore()
    refiner = refiner or RefinerConfig()
    app = FastAPI(title="sketchdoc", version="0.1.0")

    @app.exception_handler(EngineError)
    async def engine_error_handler(_: Request, exc: EngineError):
        if isinstance(exc, VALIDATION_ERRORS):
            status = 422
        elif isinstance(exc, NOT_FOUND_ERRORS):
            status = 404
        else:
            status = 409
        return JSONResponse(status_code=status, content={"detail": {"code": exc.code, "message": exc.message}})

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        vp = Viewport(**body.viewport) if body.viewport else Viewport()
        session = store.create(body.chart, body.data, vp)
        ctx = store.context(session.id)
        return {
            "sessionId": session.id,
            "sceneGraph": scene_to_dict(ctx.scene),
            "svg": render_svg(ctx.scene),
            "version": session.version,
            "tree": _tree_dict(session),
        }

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = store.get(session_id)
        ctx = store.context(session_id)
        state = _state(session)
        state["sceneGraph"] = scene_to_dict(ctx.scene)
        state["svg"] = render_svg(ctx.scene)
        return state

    @app.post("/sessions/{session_id}/sketches")
    def submit_sketch(session_id: str, body: SketchBody):
        session = store.get(session_id)
        ctx = store.context(session_id)
        points = clamp_points([(p[0], p[1]) for p in body.points], ctx.viewport)
        selection = resolve(ctx.scene, SketchPath(points))
        # fact computation and refinement run outside the session lock
        drafts, grouped = cards_for_selection(ctx, selection, refiner)
        with store.lock(session_id):
            color = PALETTE[session.counters["sketch"] % len(PALETTE)]
            sketch = SketchRecord(session.next_id("sketch"), color, points)
            session.sketches.append(sketch)
            new_cards = []
            for draft in drafts:
                card = DocumentationCard(
                    id=session.next_id("card"),
                    sketch_id=sketch.id,
                    color=color,
                    text=draft.text,
                    spans=draft.spans,
                    key_messages=draft.key_messages,
                    scope_label=draft.scope_label,
                    facts=tuple(
                        {"id": f"f{i + 1}", **fact.to_dict()} for i, fact in enumerate(draft.facts)
                    ),
                    created_at=session.tick(),
                )
                new_cards.append(card)
            for card in reversed(new_cards):
                docstore.insert_card(session, card)
            if grouped and len(new_cards) > 1:
                docstore.group_cards(session, [c.id for c in new_cards])
            store.save(session)
            return {
                "sessionId": session.id,
                "sketch": {"id": sketch.id, "color": color},
                "selection": selection.to_dict(),
                "highlightRowIds": sorted(selection.row_ids),
                "cards": [_card_dict(c) for c in new_cards],
                "grouped": grouped,
                "version": session.version,
                "tree": _tree_dict(session),
            }

    def _mutate(session_id: str, fn) -> dict:
        session = store.get(session_id)
        with store.lock(session_id):
            fn(session)
            store.save(session)
            return _state(session)

    @app.delete("/sessions/{session_id}/cards/{card_id}")
    def delete_card(session_id: str, card_id: str):
        return _mutate(session_id, lambda s: docstore.delete_card(s, card_id))

    @app.delete("/sessions/{session_id}/cards")
    def delete_all(session_id: str):
        return _mutate(session_id, docstore.delete_all)

    @app.delete("/sessions/{session_id}/sketches/{sketch_id}")
    def delete_sketch(session_id: str, sketch_id: str):
        return _mutate(session_id, lambda s: docstore.delete_sketch(s, sketch_id))

    @app.post("/sessions/{session_id}/groups")
    def group_cards(session_id: str, body: GroupBody):
        return _mutate(session_id, lambda s: docstore.group_cards(s, body.cardIds))

    @app.post("/sessions/{session_id}/group-all")
    def group_all(session_id: str):
        return _mutate(session_id, docstore.group_all)

    @app.patch("/sessions/{session_id}/cards/{card_id}")
    def edit_card(session_id: str, card_id: str, body: EditBody):
        return _mutate(session_id, lambda s: docstore.edit_card(s, card_id, body.text))

    @app.patch("/sessions/{session_id}/tree")
    def move_node(session_id: str, body: MoveBody):
        return _mutate(
            session_id,
            lambda s: docstore.move_node(s, body.nodeId, index=body.index, group_id=body.group),
        )

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str, format: str = "markdown"):
        session = store.get(session_id)
        if format == "json":
            return JSONResponse(content=docstore.session_to_dict(session))
        return PlainTextResponse(docstore.export_markdown(session), media_type="text/markdown")

    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
