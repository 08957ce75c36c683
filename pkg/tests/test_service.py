import pytest
from fastapi.testclient import TestClient

from sketchdoc.service import SessionStore, create_app

from conftest import MOVIES_CHART, bar_mark, circle_points, movies_records, rect_polygon, trace_tops


@pytest.fixture()
def client(tmp_path):
    store = SessionStore(tmp_path / "sessions")
    return TestClient(create_app(store))


@pytest.fixture()
def sid(client):
    resp = client.post("/sessions", json={"chart": MOVIES_CHART, "data": movies_records()})
    assert resp.status_code == 200
    return resp.json()["sessionId"]


def _ctx():
    from sketchdoc.dataset import load_table
    from sketchdoc.pipeline import build_chart

    return build_chart(MOVIES_CHART, load_table(movies_records()))


def test_create_session_returns_scene_and_svg(client):
    resp = client.post("/sessions", json={"chart": MOVIES_CHART, "data": movies_records()})
    body = resp.json()
    assert resp.status_code == 200
    assert len(body["sceneGraph"]["marks"]) == 10
    assert body["svg"].startswith("<svg")


def test_create_session_unknown_field(client):
    chart = {"mark": "bar", "encoding": {"x": {"field": "Nope"}, "y": {"field": "Count"}}}
    resp = client.post("/sessions", json={"chart": chart, "data": movies_records()})
    assert resp.status_code == 422
    assert resp.json()["detail"]["code"] == "UnknownField"


def test_create_session_unsupported_mark(client):
    chart = {"mark": "area", "encoding": {"x": {"field": "Year"}, "y": {"field": "Count"}}}
    resp = client.post("/sessions", json={"chart": chart, "data": movies_records()})
    assert resp.status_code == 422
    assert resp.json()["detail"]["code"] == "UnsupportedMark"


def test_sketch_inserts_trend_card_first(client, sid):
    ctx = _ctx()
    resp = client.post(f"/sessions/{sid}/sketches",
                       json={"points": trace_tops(ctx, "Drama")})
    body = resp.json()
    assert resp.status_code == 200
    assert len(body["cards"]) == 1
    assert "decreased" in body["cards"][0]["text"]
    assert body["tree"][0] == {"card": body["cards"][0]["id"]}
    assert sorted(body["highlightRowIds"]) == [1, 3, 5, 7, 9]
    assert body["sketch"]["color"] == body["cards"][0]["color"]


def test_sketch_on_empty_corner_conflicts(client, sid):
    resp = client.post(f"/sessions/{sid}/sketches",
                       json={"points": rect_polygon(42, 42, 58, 58)})
    assert resp.status_code == 409
    assert resp.json()["detail"]["code"] == "EmptySelection"


def test_single_bar_circle_returns_three_grouped_cards(client, sid):
    ctx = _ctx()
    mark = bar_mark(ctx, 2007, "Action")
    resp = client.post(f"/sessions/{sid}/sketches",
                       json={"points": circle_points(mark.x + mark.w / 2, mark.y, 15)})
    body = resp.json()
    assert resp.status_code == 200
    assert len(body["cards"]) == 3
    assert body["grouped"]
    assert "group" in body["tree"][0]
    assert body["tree"][0]["cards"] == [c["id"] for c in body["cards"]]
    labels = [c["scopeLabel"] for c in body["cards"]]
    assert labels == ["vs. all items", "vs. same Genre", "vs. same Year"]


def test_card_mutations_roundtrip(client, sid):
    ctx = _ctx()
    for genre in ("Drama", "Action"):
        client.post(f"/sessions/{sid}/sketches", json={"points": trace_tops(ctx, genre)})
    state = client.get(f"/sessions/{sid}").json()
    ids = [n["card"] for n in state["tree"]]
    assert len(ids) == 2

    grouped = client.post(f"/sessions/{sid}/groups", json={"cardIds": ids})
    assert grouped.status_code == 200
    tree = grouped.json()["tree"]
    assert len(tree) == 1 and tree[0]["cards"] == ids

    # ids[0] is the most recent card (the Action trend); keep one key message alive
    edited = client.patch(f"/sessions/{sid}/cards/{ids[0]}", json={"text": "Action wavered."})
    assert edited.status_code == 200
    card = edited.json()["cards"][ids[0]]
    assert card["edited"]
    spans = {card["text"][s[0]:s[1]] for s in card["spans"]}
    assert spans == {"Action", "wavered"}

    moved = client.patch(f"/sessions/{sid}/tree", json={"nodeId": ids[0], "index": 0})
    assert moved.status_code == 200
    assert moved.json()["tree"][0] == {"card": ids[0]}


def test_move_group_into_group_is_409(client, sid):
    ctx = _ctx()
    for genre in ("Drama", "Action"):
        client.post(f"/sessions/{sid}/sketches", json={"points": trace_tops(ctx, genre)})
    mark = bar_mark(ctx, 2007, "Action")
    client.post(f"/sessions/{sid}/sketches",
                json={"points": circle_points(mark.x + mark.w / 2, mark.y, 15)})
    state = client.get(f"/sessions/{sid}").json()
    group_id = next(n["group"] for n in state["tree"] if "group" in n)
    card_ids = [n["card"] for n in state["tree"] if "card" in n]
    g2 = client.post(f"/sessions/{sid}/groups", json={"cardIds": card_ids}).json()
    other_group = next(n["group"] for n in g2["tree"] if n.get("group") != group_id)
    resp = client.patch(f"/sessions/{sid}/tree",
                        json={"nodeId": group_id, "index": 0, "group": other_group})
    assert resp.status_code == 409
    assert resp.json()["detail"]["code"] == "InvalidTarget"


def test_delete_card_removes_sketch(client, sid):
    ctx = _ctx()
    resp = client.post(f"/sessions/{sid}/sketches", json={"points": trace_tops(ctx, "Drama")})
    card_id = resp.json()["cards"][0]["id"]
    out = client.delete(f"/sessions/{sid}/cards/{card_id}").json()
    assert out["cards"] == {} and out["sketches"] == []


def test_delete_all(client, sid):
    ctx = _ctx()
    for genre in ("Drama", "Action"):
        client.post(f"/sessions/{sid}/sketches", json={"points": trace_tops(ctx, genre)})
    out = client.delete(f"/sessions/{sid}/cards").json()
    assert out["tree"] == [] and out["sketches"] == []


def test_export_markdown(client, sid):
    ctx = _ctx()
    client.post(f"/sessions/{sid}/sketches", json={"points": trace_tops(ctx, "Drama")})
    resp = client.get(f"/sessions/{sid}/export", params={"format": "markdown"})
    assert resp.status_code == 200
    assert resp.text.startswith("# Movies released by genre")
    assert "decreased" in resp.text


def test_unknown_session_404(client):
    assert client.get("/sessions/s999").status_code == 404
    assert client.post("/sessions/s999/sketches", json={"points": [[0, 0], [9, 9]]}).status_code == 404


def test_concurrent_sketches_do_not_interleave_sessions(client):
    from concurrent.futures import ThreadPoolExecutor

    ctx = _ctx()
    sids = [client.post("/sessions", json={"chart": MOVIES_CHART, "data": movies_records()}).json()["sessionId"]
            for _ in range(2)]

    def hammer(sid):
        for genre in ("Drama", "Action") * 3:
            assert client.post(f"/sessions/{sid}/sketches",
                               json={"points": trace_tops(ctx, genre)}).status_code == 200

    with ThreadPoolExecutor(max_workers=2) as pool:
        list(pool.map(hammer, sids))
    for sid in sids:
        state = client.get(f"/sessions/{sid}").json()
        assert len(state["cards"]) == 6
        assert len(state["sketches"]) == 6
        assert state["version"] == 6  # one insert per sketch, nothing cross-talked


def test_sessions_survive_restart(tmp_path):
    directory = tmp_path / "sessions"
    store = SessionStore(directory)
    client = TestClient(create_app(store))
    sid = client.post("/sessions", json={"chart": MOVIES_CHART, "data": movies_records()}).json()["sessionId"]
    ctx = _ctx()
    client.post(f"/sessions/{sid}/sketches", json={"points": trace_tops(ctx, "Drama")})
    before = client.get(f"/sessions/{sid}/export").text

    reopened = TestClient(create_app(SessionStore(directory)))
    assert reopened.get(f"/sessions/{sid}/export").text == before
    # the restored store keeps allocating fresh session ids
    new_sid = reopened.post("/sessions", json={"chart": MOVIES_CHART, "data": movies_records()}).json()["sessionId"]
    assert new_sid != sid
