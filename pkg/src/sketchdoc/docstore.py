"""Documentation session model: cards in a two-level tree, plus persistence.

New cards always land first at the top level. Cards born from a sketch stay
paired with it: deleting either side removes both. Sessions serialize to a
canonical JSON document so saves are byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .dataset import DataTable
from .errors import AlreadyGrouped, DuplicateId, InvalidTarget, TooFew, UnknownCard
from .layout import Viewport
from .nlg import Message, Span, match_spans
from .sketch import Point

SCHEMA_VERSION = 1


@dataclass
class SketchRecord:
    id: str
    color: str
    points: tuple[Point, ...]


@dataclass
class DocumentationCard:
    id: str
    sketch_id: str | None
    color: str
    text: str
    spans: tuple[Span, ...]
    key_messages: tuple[Message, ...]
    scope_label: str
    facts: tuple[dict, ...]
    created_at: int
    edited: bool = False


@dataclass
class CardNode:
    card_id: str


@dataclass
class GroupNode:
    id: str
    card_ids: list[str]


Node = CardNode | GroupNode


@dataclass
class Session:
    id: str
    chart_doc: dict
    table: DataTable
    viewport: Viewport = field(default_factory=Viewport)
    sketches: list[SketchRecord] = field(default_factory=list)
    cards: dict[str, DocumentationCard] = field(default_factory=dict)
    tree: list[Node] = field(default_factory=list)
    version: int = 0
    counters: dict[str, int] = field(default_factory=lambda: {"card": 0, "sketch": 0, "group": 0, "tick": 0})

    def next_id(self, kind: str) -> str:
        self.counters[kind] += 1
        return f"{kind[0]}{self.counters[kind]}"

    def tick(self) -> int:
        self.counters["tick"] += 1
        return self.counters["tick"]

    @property
    def title(self) -> str:
        return self.chart_doc.get("title") or "Untitled chart"


def _bump(session: Session) -> None:
    session.version += 1


def _find_card_slot(session: Session, card_id: str) -> tuple[int, GroupNode | None, int]:
    """(top index, enclosing group or None, index inside group)."""
    for i, node in enumerate(session.tree):
        if isinstance(node, CardNode) and node.card_id == card_id:
            return i, None, -1
        if isinstance(node, GroupNode) and card_id in node.card_ids:
            return i, node, node.card_ids.index(card_id)
    raise UnknownCard(f"card {card_id!r} is not in the tree")


def insert_card(session: Session, card: DocumentationCard) -> None:
    """New cards go first, at the top level."""
    if card.id in session.cards:
        raise DuplicateId(f"card id {card.id!r} already exists")
    session.cards[card.id] = card
    session.tree.insert(0, CardNode(card.id))
    _bump(session)


def delete_card(session: Session, card_id: str) -> None:
    """Remove a card, its linked sketch, and any group it empties."""
    if card_id not in session.cards:
        raise UnknownCard(f"no card {card_id!r}")
    i, group, gi = _find_card_slot(session, card_id)
    if group is None:
        session.tree.pop(i)
    else:
        group.card_ids.pop(gi)
        if not group.card_ids:
            session.tree.pop(i)
    card = session.cards.pop(card_id)
    if card.sketch_id is not None:
        session.sketches = [s for s in session.sketches if s.id != card.sketch_id]
    _bump(session)


def delete_sketch(session: Session, sketch_id: str) -> None:
    """Deleting a sketch removes its card too (two-way pairing)."""
    for card in list(session.cards.values()):
        if card.sketch_id == sketch_id:
            delete_card(session, card.id)
            return
    session.sketches = [s for s in session.sketches if s.id != sketch_id]
    _bump(session)


def group_cards(session: Session, card_ids: list[str]) -> GroupNode:
    """Group top-level cards; the group takes the first selected card's slot."""
    if len(card_ids) < 2:
        raise TooFew("grouping needs at least 2 cards")
    if len(set(card_ids)) != len(card_ids):
        raise DuplicateId("duplicate card ids in group request")
    for cid in card_ids:
        if cid not in session.cards:
            raise UnknownCard(f"no card {cid!r}")
        _, group, _ = _find_card_slot(session, cid)
        if group is not None:
            raise AlreadyGrouped(f"card {cid!r} is already grouped")
    first = card_ids[0]
    group = GroupNode(session.next_id("group"), list(card_ids))
    # drop all members except the anchor, then swap the anchor for the group
    session.tree = [n for n in session.tree
                    if not (isinstance(n, CardNode) and n.card_id in card_ids[1:])]
    anchor = next(i for i, n in enumerate(session.tree)
                  if isinstance(n, CardNode) and n.card_id == first)
    session.tree[anchor] = group
    _bump(session)
    return group


def group_all(session: Session) -> GroupNode:
    """Flatten existing groups and gather every card into a single group."""
    ordered: list[str] = []
    for node in session.tree:
        if isinstance(node, CardNode):
            ordered.append(node.card_id)
        else:
            ordered.extend(node.card_ids)
    if len(ordered) < 2:
        raise TooFew("grouping needs at least 2 cards")
    group = GroupNode(session.next_id("group"), ordered)
    session.tree = [group]
    _bump(session)
    return group


def _find_node(session: Session, node_id: str) -> tuple[int, Node]:
    for i, node in enumerate(session.tree):
        if isinstance(node, CardNode) and node.card_id == node_id:
            return i, node
        if isinstance(node, GroupNode) and node.id == node_id:
            return i, node
    raise UnknownCard(f"no top-level node {node_id!r}")


def move_node(session: Session, node_id: str, *, index: int, group_id: str | None = None) -> None:
    """Relocate a card (or a whole group) to a top-level index or into a group.

    Everything is validated before any mutation, so a rejected move leaves
    the tree untouched.
    """
    top_index: int | None = None
    source_group: GroupNode | None = None
    moving_group = False
    for i, n in enumerate(session.tree):
        if isinstance(n, CardNode) and n.card_id == node_id:
            top_index = i
            break
        if isinstance(n, GroupNode) and n.id == node_id:
            top_index, moving_group = i, True
            break
    if top_index is None:
        if node_id not in session.cards:
            raise UnknownCard(f"no node {node_id!r}")
        _, source_group, _ = _find_card_slot(session, node_id)

    prunes_source = source_group is not None and len(source_group.card_ids) == 1
    if group_id is None:
        projected = len(session.tree) - (1 if top_index is not None else 0) - (1 if prunes_source else 0)
        if not 0 <= index <= projected:
            raise InvalidTarget(f"top-level index {index} out of range")
    else:
        if moving_group:
            raise InvalidTarget("cannot move a group into a group")
        _, target = _find_node(session, group_id)
        if not isinstance(target, GroupNode):
            raise InvalidTarget(f"{group_id!r} is not a group")
        projected = len(target.card_ids) - (1 if target is source_group else 0)
        if target is source_group and prunes_source:
            raise InvalidTarget("move would empty its own target group")
        if not 0 <= index <= projected:
            raise InvalidTarget(f"group index {index} out of range")

    # detach
    if top_index is not None:
        node = session.tree.pop(top_index)
    else:
        source_group.card_ids.remove(node_id)
        node = CardNode(node_id)
        if not source_group.card_ids:
            session.tree.remove(source_group)

    if group_id is None:
        session.tree.insert(index, node)
    else:
        _, target = _find_node(session, group_id)
        target.card_ids.insert(index, node.card_id)
    _bump(session)


def edit_card(session: Session, card_id: str, new_text: str) -> DocumentationCard:
    """Replace the text; spans are recomputed over the surviving key messages."""
    if card_id not in session.cards:
        raise UnknownCard(f"no card {card_id!r}")
    card = session.cards[card_id]
    spans, _ = match_spans(new_text, card.key_messages)
    updated = replace(card, text=new_text, spans=spans, edited=True)
    session.cards[card_id] = updated
    _bump(session)
    return updated


def delete_all(session: Session) -> None:
    session.cards.clear()
    session.tree.clear()
    session.sketches.clear()
    _bump(session)


def export_markdown(session: Session) -> str:
    """Deterministic Markdown: title heading, groups as nested bullet lists."""
    lines = [f"# {session.title}", ""]
    group_no = 0
    for node in session.tree:
        if isinstance(node, CardNode):
            lines.append(f"- {session.cards[node.card_id].text}")
        else:
            group_no += 1
            lines.append(f"- Group {group_no}:")
            for cid in node.card_ids:
                lines.append(f"  - {session.cards[cid].text}")
    return "\n".join(lines) + "\n"


# -- persistence ---------------------------------------------------------------

def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def session_to_dict(session: Session) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "id": session.id,
        "version": session.version,
        "counters": session.counters,
        "viewport": session.viewport.to_dict(),
        "chart": session.chart_doc,
        "table": session.table.to_dict(),
        "sketches": [
            {"id": s.id, "color": s.color, "points": [list(p) for p in s.points]}
            for s in session.sketches
        ],
        "cards": [
            {
                "id": c.id,
                "sketchId": c.sketch_id,
                "color": c.color,
                "text": c.text,
                "spans": [list(s) for s in c.spans],
                "keyMessages": [list(m) for m in c.key_messages],
                "scopeLabel": c.scope_label,
                "facts": list(c.facts),
                "createdAt": c.created_at,
                "edited": c.edited,
            }
            for c in sorted(session.cards.values(), key=lambda c: c.created_at)
        ],
        "tree": [
            {"card": n.card_id} if isinstance(n, CardNode) else {"group": n.id, "cards": list(n.card_ids)}
            for n in session.tree
        ],
    }


def session_from_dict(doc: dict) -> Session:
    vp = doc["viewport"]
    session = Session(
        id=doc["id"],
        chart_doc=doc["chart"],
        table=DataTable.from_dict(doc["table"]),
        viewport=Viewport(vp["width"], vp["height"], vp["margin"]),
        version=doc["version"],
        counters=dict(doc["counters"]),
    )
    session.sketches = [
        SketchRecord(s["id"], s["color"], tuple((p[0], p[1]) for p in s["points"]))
        for s in doc["sketches"]
    ]
    for c in doc["cards"]:
        session.cards[c["id"]] = DocumentationCard(
            id=c["id"],
            sketch_id=c["sketchId"],
            color=c["color"],
            text=c["text"],
            spans=tuple((s[0], s[1], s[2]) for s in c["spans"]),
            key_messages=tuple((m[0], m[1]) for m in c["keyMessages"]),
            scope_label=c["scopeLabel"],
            facts=tuple(c["facts"]),
            created_at=c["createdAt"],
            edited=c["edited"],
        )
    for n in doc["tree"]:
        if "card" in n:
            session.tree.append(CardNode(n["card"]))
        else:
            session.tree.append(GroupNode(n["group"], list(n["cards"])))
    return session


def save_session(session: Session, path: str | Path) -> None:
    Path(path).write_text(canonical_json(session_to_dict(session)), encoding="utf-8")


def load_session(path: str | Path) -> Session:
    return session_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
