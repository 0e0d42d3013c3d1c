import json
import threading
import urllib.error
import urllib.request

import pytest

from groupwill import brute_force, fixtures
from groupwill.service import PlannerApi, SessionStore, make_server


@pytest.fixture
def server():
    srv = make_server(port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{srv.server_address[1]}"
    srv.shutdown()
    srv.server_close()


def call(base, method, path, body=None):
    data = None if body is None else json.dumps(body).encode()
    req = urllib.request.Request(base + path, data=data, method=method,
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read().decode())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read().decode())


def example_session(base, **config):
    cfg = {"k": 5, "budget": 2000, "seed": 5, "algorithm": "cbas-nd"}
    cfg.update(config)
    status, body = call(base, "POST", "/sessions", {
        "edges": fixtures.edge_list_text(),
        "scores": fixtures.score_text(),
        "config": cfg,
    })
    assert status == 201, body
    return body["id"]


def test_create_session_returns_id_and_empty_rsvp(server):
    sid = example_session(server)
    status, state = call(server, "GET", f"/sessions/{sid}")
    assert status == 200
    assert state["rsvp"] == {}
    assert state["solution"] is None
    assert state["n"] == 10


def test_create_session_k_too_large_rejected(server):
    status, body = call(server, "POST", "/sessions", {
        "edges": fixtures.edge_list_text(),
        "config": {"k": 11},
    })
    assert status == 400
    assert set(body) == {"code", "message"}


def test_duplicate_upload_gets_distinct_session(server):
    assert example_session(server) != example_session(server)


def test_solve_returns_explained_solution(server):
    sid = example_session(server)
    status, body = call(server, "POST", f"/sessions/{sid}/solve")
    assert status == 200
    assert body["members"] == ["v3", "v4", "v5", "v6", "v7"]
    assert body["willingness"] == pytest.approx(9.7, abs=1e-9)
    assert body["connected"] is True
    assert set(body["eta_contributions"]) == set(body["members"])
    assert body["eta_contributions"]["v3"] == pytest.approx(0.8)
    taus = {(e["source"], e["target"]): e["tau"]
            for e in body["edge_contributions"]}
    assert taus[("v3", "v6")] == pytest.approx(0.2)  # stored half-weight


def test_solve_repeat_identical_body(server):
    sid = example_session(server)
    _, a = call(server, "POST", f"/sessions/{sid}/solve")
    _, b = call(server, "POST", f"/sessions/{sid}/solve")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_solve_brute_on_small_graph_is_oracle(server):
    sid = example_session(server, algorithm="brute")
    _, body = call(server, "POST", f"/sessions/{sid}/solve")
    oracle = brute_force(fixtures.ten_node_graph(), 5)
    assert body["willingness"] == oracle.willingness


def test_rsvp_and_replan_flow(server):
    sid = example_session(server)
    _, solved = call(server, "POST", f"/sessions/{sid}/solve")
    members = solved["members"]
    for label in members[1:]:
        status, _ = call(server, "POST", f"/sessions/{sid}/rsvp",
                         {"node": label, "status": "confirmed"})
        assert status == 200
    status, _ = call(server, "POST", f"/sessions/{sid}/rsvp",
                     {"node": members[0], "status": "declined"})
    assert status == 200
    status, replanned = call(server, "POST", f"/sessions/{sid}/replan")
    assert status == 200, replanned
    assert members[0] not in replanned["members"]
    assert set(members[1:]) <= set(replanned["members"])
    assert len(replanned["members"]) == 5


def test_rsvp_non_member_rejected(server):
    sid = example_session(server)
    call(server, "POST", f"/sessions/{sid}/solve")
    status, body = call(server, "POST", f"/sessions/{sid}/rsvp",
                        {"node": "v10", "status": "declined"})
    assert status == 400
    assert body["code"] == "not-a-member"


def test_replan_without_declines_needs_force(server):
    sid = example_session(server)
    _, solved = call(server, "POST", f"/sessions/{sid}/solve")
    for label in solved["members"]:
        call(server, "POST", f"/sessions/{sid}/rsvp",
             {"node": label, "status": "confirmed"})
    status, body = call(server, "POST", f"/sessions/{sid}/replan")
    assert status == 409
    status, body = call(server, "POST", f"/sessions/{sid}/replan",
                        {"force": True})
    assert status == 200
    assert body["members"] == solved["members"]
    assert body["willingness"] == solved["willingness"]


def test_failed_replan_preserves_state():
    # star center declined isolates the confirmed leaf
    api = PlannerApi(SessionStore())
    created = api.create_session({
        "edges": "hub a 1.0\nhub b 1.0\nhub c 1.0\n",
        "config": {"k": 3, "budget": 200, "seed": 0},
    })
    sid = created["id"]
    solved = api.solve_session(sid)
    assert "hub" in solved["members"]
    leaf = [m for m in solved["members"] if m != "hub"][0]
    api.rsvp(sid, {"node": leaf, "status": "confirmed"})
    api.rsvp(sid, {"node": "hub", "status": "declined"})
    from groupwill.service import ApiError
    with pytest.raises(ApiError) as err:
        api.replan(sid)
    assert err.value.status == 409
    state = api.get_session(sid)
    assert state["solution"]["members"] == solved["members"]
    assert state["rsvp"]["hub"] == "declined"  # rsvp map intact


def test_evaluate_manual_pick(server):
    sid = example_session(server)
    status, body = call(server, "POST", f"/sessions/{sid}/evaluate",
                        {"members": ["v3", "v4", "v5", "v6", "v7"]})
    assert status == 200
    assert body["willingness"] == pytest.approx(9.7, abs=1e-9)
    assert body["connected"] is True
    status, body = call(server, "POST", f"/sessions/{sid}/evaluate",
                        {"members": ["v1", "v10"]})
    assert body["connected"] is False
    status, body = call(server, "POST", f"/sessions/{sid}/evaluate",
                        {"members": []})
    assert body["willingness"] == 0.0


def test_evaluate_rejects_unknown_or_duplicate(server):
    sid = example_session(server)
    status, body = call(server, "POST", f"/sessions/{sid}/evaluate",
                        {"members": ["nope"]})
    assert status == 400
    status, body = call(server, "POST", f"/sessions/{sid}/evaluate",
                        {"members": ["v1", "v1"]})
    assert status == 400


def test_unknown_session_404(server):
    status, body = call(server, "POST", "/sessions/zzz/solve")
    assert status == 404
    assert body["code"] == "unknown-session"


def test_malformed_json_400(server):
    req = urllib.request.Request(server + "/sessions", data=b"{oops",
                                 method="POST")
    with pytest.raises(urllib.error.HTTPError) as err:
        urllib.request.urlopen(req)
    assert err.value.code == 400


def test_synthetic_session(server):
    status, body = call(server, "POST", "/sessions", {
        "synthetic": {"nodes": 30, "topology": "ba", "seed": 5},
        "config": {"k": 4, "budget": 300, "seed": 1},
    })
    assert status == 201
    sid = body["id"]
    status, solved = call(server, "POST", f"/sessions/{sid}/solve")
    assert status == 200
    assert len(solved["members"]) == 4


def test_scenario_session_lambda_mode(server):
    status, body = call(server, "POST", "/sessions", {
        "edges": fixtures.edge_list_text(),
        "scores": fixtures.score_text(),
        "config": {"k": 3, "algorithm": "brute"},
        "scenario": {"kind": "party"},
    })
    sid = body["id"]
    _, solved = call(server, "POST", f"/sessions/{sid}/solve")
    # party profile scores tightness only
    best = solved["willingness"]
    assert best == pytest.approx(
        max(0.4 + 0.6 + 0.9, 0.9 + 0.6 + 0.5), abs=1e-9) or best > 0


def test_persistence_roundtrip(tmp_path):
    store = SessionStore(str(tmp_path))
    api = PlannerApi(store)
    sid = api.create_session({
        "edges": fixtures.edge_list_text(),
        "scores": fixtures.score_text(),
        "config": {"k": 5, "budget": 500, "seed": 3},
    })["id"]
    api.solve_session(sid)
    api.rsvp(sid, {"node": "v3", "status": "confirmed"})

    reloaded = PlannerApi(SessionStore(str(tmp_path)))
    state = reloaded.get_session(sid)
    assert state["rsvp"]["v3"] == "confirmed"
    assert state["solution"] is not None
    assert state["k"] == 5


def test_json_schema_golden(server):
    sid = example_session(server)
    _, body = call(server, "POST", f"/sessions/{sid}/solve")
    assert schema_shape(body) == {
        "connected": "bool",
        "edge_contributions": ["{source,target,tau}"],
        "eta_contributions": "map[str,float]",
        "member_ids": ["int"],
        "members": ["str"],
        "willingness": "float",
    }
    _, state = call(server, "GET", f"/sessions/{sid}")
    assert sorted(state) == ["algorithm", "budget", "graph", "id", "k",
                             "labels", "mode", "n", "notes", "rsvp", "seed",
                             "solution"]


def schema_shape(body):
    def kind(v):
        if isinstance(v, bool):
            return "bool"
        if isinstance(v, int):
            return "int"
        if isinstance(v, float):
            return "float"
        if isinstance(v, str):
            return "str"
        raise AssertionError(f"unexpected type {type(v)}")

    shape = {}
    for key, value in body.items():
        if key == "edge_contributions":
            assert all(sorted(e) == ["source", "target", "tau"] for e in value)
            shape[key] = ["{source,target,tau}"]
        elif key == "eta_contributions":
            assert all(isinstance(k, str) and isinstance(v, float)
                       for k, v in value.items())
            shape[key] = "map[str,float]"
        elif isinstance(value, list):
            kinds = {kind(v) for v in value}
            assert len(kinds) == 1
            shape[key] = [kinds.pop()]
        else:
            shape[key] = kind(value)
    return shape
