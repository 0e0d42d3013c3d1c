"""JSON-over-HTTP planning service backing the organizer UI.

Endpoints: POST /sessions, GET /sessions/{id}, POST /sessions/{id}/solve,
/rsvp, /replan, /evaluate.  All numbers a client displays come from these
responses.  State transitions are atomic per session: a failed replan leaves
the stored solution and RSVP map untouched.  Error bodies are
{"code": str, "message": str}.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field, replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any

from .errors import GroupwillError, InfeasibleError
from .graph import (SocialGraph, Solution, WeightMode, build_graph,
                    is_connected, willingness)
from .scenarios import apply_scenario_spec, solve_waso_dis
from .solvers import SolverConfig, online_replan, solve
from .synth import synthetic_graph

RSVP_STATES = ("pending", "confirmed", "declined")


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class Session:
    """One planning conversation: a graph, a config, and RSVP progress."""

    id: str
    graph: SocialGraph
    config: SolverConfig
    mode: WeightMode = WeightMode.UNWEIGHTED
    separate_eps: float | None = None
    solution: Solution | None = None
    rsvp: dict[int, str] = field(default_factory=dict)
    notes: tuple[str, ...] = ()
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def to_state(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "n": self.graph.n,
            "labels": self.graph.labels,
            "k": self.config.k,
            "algorithm": self.config.algorithm,
            "seed": self.config.seed,
            "budget": self.config.budget,
            "mode": self.mode.value,
            "notes": list(self.notes),
            "rsvp": {self.graph.labels[v]: s for v, s in sorted(self.rsvp.items())},
            "solution": None if self.solution is None
            else _solution_body(self.graph, self.solution, self.mode),
            "graph": _graph_body(self.graph),
        }


def _graph_body(graph: SocialGraph) -> dict[str, Any]:
    seen: set[tuple[int, int]] = set()
    edges = []
    for i, j, t in graph.arcs():
        key = (min(i, j), max(i, j))
        if key in seen:
            continue
        seen.add(key)
        edges.append({
            "source": graph.labels[key[0]],
            "target": graph.labels[key[1]],
            "tau": graph.tau(key[0], key[1]) + graph.tau(key[1], key[0]),
        })
    return {
        "nodes": [{"label": graph.labels[i], "eta": float(graph.eta[i]),
                   "lam": float(graph.lam[i])} for i in range(graph.n)],
        "edges": edges,
    }


def _solution_body(graph: SocialGraph, sol: Solution,
                   mode: WeightMode) -> dict[str, Any]:
    members = sol.sorted_members()
    mem = set(members)
    contributions = {}
    for i in members:
        eta_part = float(graph.eta[i])
        if mode is WeightMode.LAMBDA_WEIGHTED:
            eta_part *= float(graph.lam[i])
        contributions[graph.labels[i]] = eta_part
    edges = []
    for i in members:
        for j, t in graph.adj_out[i]:
            if j in mem:
                tau = t
                if mode is WeightMode.LAMBDA_WEIGHTED:
                    tau *= 1.0 - float(graph.lam[i])
                edges.append({"source": graph.labels[i],
                              "target": graph.labels[j], "tau": tau})
    return {
        "members": [graph.labels[i] for i in members],
        "member_ids": members,
        "willingness": sol.willingness,
        "connected": sol.connected,
        "eta_contributions": contributions,
        "edge_contributions": edges,
    }


class SessionStore:
    """In-memory session map with optional JSON snapshots per session."""

    def __init__(self, state_dir: str | None = None) -> None:
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self.state_dir = state_dir
        if state_dir:
            os.makedirs(state_dir, exist_ok=True)
            self._load_snapshots()

    def _load_snapshots(self) -> None:
        assert self.state_dir is not None
        for name in sorted(os.listdir(self.state_dir)):
            if not name.endswith(".json"):
                continue
            with open(os.path.join(self.state_dir, name), encoding="utf-8") as fh:
                raw = json.load(fh)
            mode = WeightMode(raw["mode"])
            cfg = SolverConfig(**raw["config"], mode=mode)
            sess = Session(
                id=raw["id"],
                graph=SocialGraph.from_dict(raw["graph"]),
                config=cfg,
                mode=mode,
                separate_eps=raw.get("separate_eps"),
                rsvp={int(k): v for k, v in raw["rsvp"].items()},
                notes=tuple(raw.get("notes", ())),
            )
            if raw.get("solution") is not None:
                s = raw["solution"]
                sess.solution = Solution(frozenset(s["members"]),
                                         s["willingness"], s["connected"])
            self._sessions[sess.id] = sess

    def persist(self, sess: Session) -> None:
        if not self.state_dir:
            return
        raw = {
            "id": sess.id,
            "graph": sess.graph.to_dict(),
            "config": {k: (v.value if isinstance(v, WeightMode) else v)
                       for k, v in sess.config.__dict__.items() if k != "mode"},
            "mode": sess.mode.value,
            "separate_eps": sess.separate_eps,
            "rsvp": {str(k): v for k, v in sess.rsvp.items()},
            "notes": list(sess.notes),
            "solution": None if sess.solution is None else {
                "members": sorted(sess.solution.members),
                "willingness": sess.solution.willingness,
                "connected": sess.solution.connected,
            },
        }
        path = os.path.join(self.state_dir, f"{sess.id}.json")
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(raw, fh)
        os.replace(tmp, path)

    def add(self, sess: Session) -> None:
        with self._lock:
            self._sessions[sess.id] = sess
        self.persist(sess)

    def get(self, session_id: str) -> Session:
        with self._lock:
            sess = self._sessions.get(session_id)
        if sess is None:
            raise ApiError(404, "unknown-session", f"no session {session_id}")
        return sess


class PlannerApi:
    """Transport-independent request handlers (shared by HTTP and tests)."""

    def __init__(self, store: SessionStore | None = None) -> None:
        self.store = store or SessionStore()

    # -- handlers ----------------------------------------------------------

    def create_session(self, body: dict[str, Any]) -> dict[str, Any]:
        cfg_raw = dict(body.get("config", {}))
        if "k" not in cfg_raw:
            raise ApiError(400, "bad-config", "config.k is required")
        mode = WeightMode.LAMBDA_WEIGHTED if cfg_raw.pop("weighted_lambda", False) \
            else WeightMode.UNWEIGHTED
        try:
            config = SolverConfig(**cfg_raw)
        except (TypeError, ValueError) as exc:
            raise ApiError(400, "bad-config", str(exc)) from exc

        if (body.get("edges") is None) == (body.get("synthetic") is None):
            raise ApiError(400, "bad-graph",
                           "provide exactly one of edges or synthetic")
        try:
            if body.get("edges") is not None:
                graph = build_graph(body["edges"], body.get("scores"),
                                    normalize=bool(body.get("normalize", False)))
            else:
                graph = synthetic_graph(**body["synthetic"])
        except (ValueError, GroupwillError) as exc:
            raise ApiError(400, "bad-graph", str(exc)) from exc

        notes: tuple[str, ...] = ()
        separate_eps = None
        if body.get("scenario"):
            try:
                applied = apply_scenario_spec(graph, body["scenario"])
            except (ValueError, GroupwillError) as exc:
                raise ApiError(400, "bad-scenario", str(exc)) from exc
            graph = applied.graph
            notes = applied.notes
            separate_eps = applied.separate_eps
            if applied.mode is WeightMode.LAMBDA_WEIGHTED:
                mode = applied.mode
        if config.k > graph.n:
            raise ApiError(400, "bad-config",
                           f"k={config.k} exceeds node count {graph.n}")
        sess = Session(id=uuid.uuid4().hex, graph=graph,
                       config=replace(config, mode=mode), mode=mode,
                       separate_eps=separate_eps, notes=notes)
        self.store.add(sess)
        return {"id": sess.id, "n": graph.n, "notes": list(notes)}

    def get_session(self, session_id: str) -> dict[str, Any]:
        return self.store.get(session_id).to_state()

    def solve_session(self, session_id: str) -> dict[str, Any]:
        sess = self.store.get(session_id)
        with sess.lock:
            try:
                if sess.separate_eps is not None:
                    sol = solve_waso_dis(
                        sess.graph, sess.config.k,
                        lambda g, kk: solve(g, replace(sess.config, k=kk)),
                        mode=sess.mode, eps=sess.separate_eps)
                else:
                    sol = solve(sess.graph, sess.config)
            except GroupwillError as exc:
                raise ApiError(409, "infeasible", str(exc)) from exc
            sess.solution = sol
            sess.rsvp = {v: sess.rsvp.get(v, "pending") for v in sol.members}
            self.store.persist(sess)
            return _solution_body(sess.graph, sol, sess.mode)

    def rsvp(self, session_id: str, body: dict[str, Any]) -> dict[str, Any]:
        sess = self.store.get(session_id)
        status = body.get("status")
        if status not in RSVP_STATES:
            raise ApiError(400, "bad-rsvp",
                           f"status must be one of {RSVP_STATES}")
        with sess.lock:
            if sess.solution is None:
                raise ApiError(409, "not-solved", "solve the session first")
            node = self._node_id(sess.graph, body.get("node"))
            if node not in sess.solution.members:
                raise ApiError(400, "not-a-member",
                               f"{sess.graph.labels[node]} is not in the "
                               "current group")
            sess.rsvp[node] = status
            self.store.persist(sess)
            return {"rsvp": {sess.graph.labels[v]: s
                             for v, s in sorted(sess.rsvp.items())}}

    def replan(self, session_id: str,
               body: dict[str, Any] | None = None) -> dict[str, Any]:
        sess = self.store.get(session_id)
        force = bool(body.get("force")) if body else False
        with sess.lock:
            if sess.solution is None:
                raise ApiError(409, "not-solved", "solve the session first")
            confirmed = sorted(v for v, s in sess.rsvp.items() if s == "confirmed")
            declined = sorted(v for v, s in sess.rsvp.items() if s == "declined")
            if not declined and not force:
                raise ApiError(409, "nothing-to-replan",
                               "no declines recorded; pass force=true to rerun")
            try:
                sol = online_replan(sess.graph, sess.solution, confirmed,
                                    declined, sess.config)
            except (InfeasibleError, ValueError) as exc:
                raise ApiError(409, "replan-failed", str(exc)) from exc
            sess.solution = sol
            sess.rsvp = {v: sess.rsvp.get(v, "pending") for v in sol.members}
            self.store.persist(sess)
            return _solution_body(sess.graph, sol, sess.mode)

    def evaluate(self, session_id: str, body: dict[str, Any]) -> dict[str, Any]:
        """Willingness/connectivity readout for a manual pick; the UI never
        computes these numbers itself."""
        sess = self.store.get(session_id)
        members = body.get("members")
        if not isinstance(members, list):
            raise ApiError(400, "bad-members", "members must be a list")
        ids = [self._node_id(sess.graph, m) for m in members]
        if len(set(ids)) != len(ids):
            raise ApiError(400, "bad-members", "duplicate members")
        if not ids:
            return {"willingness": 0.0, "connected": False, "members": []}
        return {
            "willingness": willingness(sess.graph, ids, sess.mode),
            "connected": is_connected(sess.graph, ids),
            "members": [sess.graph.labels[v] for v in sorted(ids)],
        }

    @staticmethod
    def _node_id(graph: SocialGraph, ref: Any) -> int:
        if isinstance(ref, str):
            try:
                return graph.id_of(ref)
            except GroupwillError as exc:
                raise ApiError(400, "unknown-node", str(exc)) from exc
        if isinstance(ref, int) and 0 <= ref < graph.n:
            return ref
        raise ApiError(400, "unknown-node", f"bad node reference {ref!r}")

    # -- routing -------------------------------------------------------------

    def dispatch(self, method: str, path: str,
                 body: dict[str, Any] | None) -> tuple[int, dict[str, Any]]:
        parts = [p for p in path.split("/") if p]
        try:
            if method == "POST" and parts == ["sessions"]:
                return 201, self.create_session(body or {})
            if len(parts) == 2 and parts[0] == "sessions" and method == "GET":
                return 200, self.get_session(parts[1])
            if len(parts) == 3 and parts[0] == "sessions" and method == "POST":
                sid, action = parts[1], parts[2]
                if action == "solve":
                    return 200, self.solve_session(sid)
                if action == "rsvp":
                    return 200, self.rsvp(sid, body or {})
                if action == "replan":
                    return 200, self.replan(sid, body)
                if action == "evaluate":
                    return 200, self.evaluate(sid, body or {})
            raise ApiError(404, "not-found", f"no route {method} {path}")
        except ApiError as exc:
            return exc.status, {"code": exc.code, "message": exc.message}


def make_handler(api: PlannerApi, ui_dir: str | None = None):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt: str, *args: Any) -> None:  # quiet tests
            pass

        def _send(self, status: int, payload: dict[str, Any]) -> None:
            data = json.dumps(payload, sort_keys=True).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.end_headers()
            self.wfile.write(data)

        def do_OPTIONS(self) -> None:  # CORS preflight
            self._send(204, {})

        def do_GET(self) -> None:
            if self.path.startswith("/sessions"):
                status, payload = api.dispatch("GET", self.path, None)
                self._send(status, payload)
            elif ui_dir:
                self._serve_static()
            else:
                self._send(404, {"code": "not-found", "message": self.path})

        def do_POST(self) -> None:
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            try:
                body = json.loads(raw.decode("utf-8")) if raw else None
            except json.JSONDecodeError:
                self._send(400, {"code": "bad-json",
                                 "message": "request body is not valid JSON"})
                return
            status, payload = api.dispatch("POST", self.path, body)
            self._send(status, payload)

        def _serve_static(self) -> None:
            assert ui_dir is not None
            rel = self.path.lstrip("/") or "index.html"
            rel = rel.split("?", 1)[0]
            full = os.path.realpath(os.path.join(ui_dir, rel))
            if not full.startswith(os.path.realpath(ui_dir)) or not os.path.isfile(full):
                self._send(404, {"code": "not-found", "message": self.path})
                return
            ctype = {"html": "text/html", "js": "text/javascript",
                     "css": "text/css", "json": "application/json",
                     "edges": "text/plain", "scores": "text/plain",
                     }.get(full.rsplit(".", 1)[-1], "application/octet-stream")
            with open(full, "rb") as fh:
                data = fh.read()
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(data)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(data)

    return Handler


def make_server(host: str = "127.0.0.1", port: int = 0,
                state_dir: str | None = None,
                ui_dir: str | None = None) -> ThreadingHTTPServer:
    api = PlannerApi(SessionStore(state_dir))
    return ThreadingHTTPServer((host, port), make_handler(api, ui_dir))


def serve(host: str = "127.0.0.1", port: int = 8750,
          state_dir: str | None = None, ui_dir: str | None = None) -> None:
    server = make_server(host, port, state_dir, ui_dir)
    print(f"planning service on http://{host}:{server.server_address[1]}/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
