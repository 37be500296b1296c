"""Live maze session service: humans play through HTTP, logs match agents'.

Each session is one experiment plan played phase by phase. Actions apply in
strict arrival order per session (a lock serializes them), every action is
appended to the session's phase log on disk before the response returns, and
exports read back from disk, so a finished session survives a process
restart. Views are fog-of-war: only cells in line of sight are ever sent.

Routes:
    POST /sessions                      create a session
    POST /sessions/{id}/actions        apply one action (or "done" to end an
                                        exploration phase early)
    POST /sessions/{id}/advance        move a completed phase to the next one
    GET  /sessions/{id}                current view
    GET  /sessions/{id}/export         full session document (analysis schema)
    GET  /mazes/{id}                   library maze text and dimensions
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
import uuid
from dataclasses import replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import library
from .logs import START_ACTION, TrajectoryLog, parse_jsonl
from .maze import (ACTIONS, HEADINGS, MazeSpec, neighbor, observe, start_state,
                   step)
from .protocol import (EVENTS_FILE, META_FILE, PhasePlan, PhaseResult,
                       ProtocolError, RewardEvent, SessionLog, build_plan,
                       phase_completion_event, phase_file, read_session,
                       session_meta)

DONE_CONTROL = "done"

BANNERS = {
    "explore": "Explore freely.",
    "goal": "Find the gummy!",
    "blocked": "Find the gummy! The maze may have changed.",
}


class ServiceError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


class LiveSession:
    """One subject's live playthrough; all mutation happens under the lock."""

    def __init__(self, session_id: str, plan, subject: str, data_dir: str):
        self.session_id = session_id
        self.plan = plan
        self.subject = subject
        self.path = os.path.join(data_dir, session_id)
        self.lock = threading.Lock()
        self.phase_idx = 0
        self.status = "active"
        self.state = None
        self.maze: MazeSpec | None = None
        self.transitions = 0
        self.consumed: list = []
        self.events: list[RewardEvent] = []
        self.log = TrajectoryLog()
        self.last_t = 0
        self._epoch = time.monotonic()

    # --- time ------------------------------------------------------------

    def _now_ms(self) -> int:
        t = int((time.monotonic() - self._epoch) * 1000)
        self.last_t = max(self.last_t, t)
        return self.last_t

    # --- persistence -------------------------------------------------------

    def _append_event(self, event: dict) -> None:
        with open(os.path.join(self.path, EVENTS_FILE), "a") as fh:
            fh.write(json.dumps(event, separators=(",", ":")) + "\n")

    def _append_record(self, record) -> None:
        with open(os.path.join(self.path, phase_file(self.phase.label)), "a") as fh:
            fh.write(record.to_json() + "\n")

    # --- phase machinery ------------------------------------------------------

    @property
    def phase(self) -> PhasePlan:
        return self.plan.phases[self.phase_idx]

    def create_on_disk(self) -> None:
        os.makedirs(self.path, exist_ok=True)
        doc = session_meta(SessionLog(session_id=self.session_id,
                                      subject={"type": "human", "tag": self.subject},
                                      plan=self.plan))
        with open(os.path.join(self.path, META_FILE), "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        self._begin_phase()

    def _begin_phase(self) -> None:
        self.maze = self.phase.maze
        self.state = start_state(self.maze)
        self.transitions = 0
        self.consumed = []
        self.events = []
        self.log = TrajectoryLog()
        t = self._now_ms()
        self.log.append(t, START_ACTION, self.state)
        self._append_event({"type": "phase_started", "label": self.phase.label})
        self._append_record(self.log.records[-1])
        # A goal phase can complete instantly when the start sits on the goal.
        if self.phase.goal_active and self.state.cell == self.maze.goal:
            self._complete_phase("goal_reached")

    def _complete_phase(self, outcome: str) -> None:
        self.status = "phase_complete"
        result = PhaseResult(plan=self.phase, outcome=outcome,
                             transitions=self.transitions, log=self.log,
                             consumed=list(self.consumed), events=list(self.events))
        self._append_event(phase_completion_event(result))

    def apply_action(self, action: str) -> dict:
        with self.lock:
            if self.status == "finished":
                raise ServiceError(409, "session is finished")
            if self.status == "phase_complete":
                raise ServiceError(409, "phase complete; advance the session first")
            if action == DONE_CONTROL:
                self._complete_phase("done")
                return self.view()
            if action not in ACTIONS:
                raise ServiceError(
                    400, f"unknown action {action!r}; legal actions: {', '.join(ACTIONS)}")
            prev = self.state
            new = step(self.maze, prev, action)
            t = self._now_ms()
            self.log.append(t, action, new)
            self._append_record(self.log.records[-1])
            consumed_now = []
            if new.cell != prev.cell:
                self.transitions += 1
                if new.cell in self.maze.apples:
                    self.maze = replace(self.maze, apples=self.maze.apples - {new.cell})
                    self.consumed.append(new.cell)
                    consumed_now.append(new.cell)
                    self.events.append(RewardEvent(t, new.cell, "apple",
                                                   self.plan.rewards.apple))
                if self.phase.goal_active and new.cell == self.maze.goal:
                    self.events.append(RewardEvent(t, new.cell, "goal",
                                                   self.plan.rewards.goal))
                    self.state = new
                    self._complete_phase("goal_reached")
                    return self.view(consumed_now=consumed_now)
            self.state = new
            if self.transitions >= self.phase.budget:
                self._complete_phase("budget_exhausted")
                return self.view(consumed_now=consumed_now)
            translation = action != "turn_right"
            return self.view(consumed_now=consumed_now,
                             collided=translation and new == prev)

    def advance(self) -> dict:
        with self.lock:
            if self.status == "finished":
                raise ServiceError(409, "session is finished")
            if self.status != "phase_complete":
                raise ServiceError(409, "phase still active; cannot advance")
            if self.phase_idx + 1 >= len(self.plan.phases):
                self.status = "finished"
                self._append_event({"type": "session_finished"})
                return self.view()
            self.phase_idx += 1
            self.status = "active"
            self._begin_phase()
            return self.view()

    def replay_current_phase(self) -> None:
        """Restore avatar state, transitions and consumption from the phase log."""
        log_path = os.path.join(self.path, phase_file(self.phase.label))
        self.maze = self.phase.maze
        self.state = start_state(self.maze)
        self.transitions = 0
        self.consumed = []
        self.events = []
        self.log = TrajectoryLog()
        if os.path.exists(log_path):
            with open(log_path) as fh:
                self.log = parse_jsonl(fh.read())
            cells = [(r.cell_x, r.cell_y) for r in self.log.records]
            for a, b in zip(cells, cells[1:]):
                if a != b:
                    self.transitions += 1
                    if b in self.maze.apples:
                        self.maze = replace(self.maze, apples=self.maze.apples - {b})
                        self.consumed.append(b)
            if self.log.records:
                self.state = self.log.records[-1].state()
                self.last_t = self.log.records[-1].t_ms
                self._epoch = time.monotonic() - self.last_t / 1000

    def view(self, consumed_now=(), collided: bool = False) -> dict:
        obs = observe(self.maze, self.state)
        visible = []
        for cell in sorted(obs.visible_cells):
            visible.append({
                "x": cell[0], "y": cell[1],
                "walls": {h: self.maze.passable(cell, neighbor(cell, h))
                          for h in HEADINGS},
                "apple": cell in self.maze.apples,
                "goal": self.maze.goal == cell,
            })
        phase = self.phase
        return {
            "session_id": self.session_id,
            "status": self.status,
            "experiment": self.plan.experiment,
            "condition": self.plan.condition,
            "phase_label": phase.label,
            "phase_kind": phase.kind,
            "phase_index": self.phase_idx + 1,
            "phase_count": len(self.plan.phases),
            "banner": BANNERS[phase.kind],
            "maze": {"width": self.maze.width, "height": self.maze.height},
            "avatar": {"x": self.state.cell[0], "y": self.state.cell[1],
                       "heading": self.state.heading,
                       "sub_offset": self.state.sub_offset},
            "on_goal": bool(obs.on_goal),
            "visible": visible,
            "transitions": self.transitions,
            "budget": phase.budget,
            "consumed": [list(c) for c in consumed_now],
            "collided": bool(collided),
        }


class SessionStore:
    """In-memory registry backed by the session directories on disk."""

    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        os.makedirs(data_dir, exist_ok=True)
        self._sessions: dict[str, LiveSession] = {}
        self._lock = threading.Lock()

    def create(self, payload: dict) -> LiveSession:
        experiment = payload.get("experiment")
        if experiment not in (1, 2):
            raise ServiceError(400, f"unknown experiment {experiment!r}; expected 1 or 2")
        condition = payload.get("condition")
        if experiment == 2 and condition not in (None, "dense", "sparse"):
            raise ServiceError(400, f"unknown condition {condition!r}")
        maze_refs = None
        if payload.get("maze"):
            maze_refs = (payload["maze"],)
        elif payload.get("mazes"):
            maze_refs = tuple(payload["mazes"])
        try:
            plan = build_plan(experiment, condition, maze_refs, payload.get("budget"))
        except (ProtocolError, KeyError, OSError, ValueError) as exc:
            raise ServiceError(400, str(exc))
        session = LiveSession(session_id=uuid.uuid4().hex[:12], plan=plan,
                              subject=str(payload.get("subject", "anonymous")),
                              data_dir=self.data_dir)
        session.create_on_disk()
        with self._lock:
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> LiveSession:
        with self._lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
        session = self._load(session_id)
        with self._lock:
            return self._sessions.setdefault(session_id, session)

    def _load(self, session_id: str) -> LiveSession:
        """Rebuild a live session from its directory (post-restart resume)."""
        path = os.path.join(self.data_dir, session_id)
        if not os.path.isdir(path) or not os.path.exists(os.path.join(path, META_FILE)):
            raise ServiceError(404, f"unknown session {session_id!r}")
        stored = read_session(path)
        subject = stored.subject.get("tag", "anonymous")
        session = LiveSession(session_id=session_id, plan=stored.plan,
                              subject=subject, data_dir=self.data_dir)

        finished = False
        completions: dict[str, str] = {}
        with open(os.path.join(path, EVENTS_FILE)) as fh:
            for line in fh:
                if not line.strip():
                    continue
                event = json.loads(line)
                if event["type"] == "phase_completed":
                    completions[event["label"]] = event["outcome"]
                elif event["type"] == "session_finished":
                    finished = True
        last_idx = max((i for i, p in enumerate(stored.plan.phases)
                        if os.path.exists(os.path.join(path, phase_file(p.label)))),
                       default=0)
        session.phase_idx = last_idx
        if finished:
            session.status = "finished"
        elif stored.plan.phases[last_idx].label in completions:
            session.status = "phase_complete"
        else:
            session.status = "active"
        session.replay_current_phase()
        return session

    def export(self, session_id: str) -> dict:
        path = os.path.join(self.data_dir, session_id)
        if not os.path.isdir(path) or not os.path.exists(os.path.join(path, META_FILE)):
            raise ServiceError(404, f"unknown session {session_id!r}")
        stored = read_session(path)
        from .report import session_metrics
        metrics = {m.phase_label: m for m in session_metrics(stored)}
        doc = session_meta(stored)
        doc["phases_completed"] = []
        for result in stored.phases:
            entry = phase_completion_event(result)
            entry["incomplete"] = result.outcome is None
            entry["records"] = [json.loads(r.to_json()) for r in result.log.records]
            m = metrics.get(result.plan.label)
            if m is not None:
                entry["summary"] = {"coverage": m.coverage,
                                    "steps_to_goal": m.steps_to_goal,
                                    "cells_crossed": m.cells_crossed,
                                    "re_exploration": m.re_exploration}
            doc["phases_completed"].append(entry)
        return doc


# --- HTTP layer ---------------------------------------------------------------

_ROUTES = [
    ("POST", re.compile(r"^/sessions$"), "create_session"),
    ("POST", re.compile(r"^/sessions/([^/]+)/actions$"), "submit_action"),
    ("POST", re.compile(r"^/sessions/([^/]+)/advance$"), "advance_phase"),
    ("GET", re.compile(r"^/sessions/([^/]+)/export$"), "export_session"),
    ("GET", re.compile(r"^/sessions/([^/]+)$"), "get_session"),
    ("GET", re.compile(r"^/mazes/([^/]+)$"), "get_maze"),
    ("GET", re.compile(r"^/healthz$"), "health"),
]

_STATIC_TYPES = {".html": "text/html", ".js": "text/javascript",
                 ".css": "text/css", ".map": "application/json",
                 ".png": "image/png", ".svg": "image/svg+xml"}


class SessionHandler(BaseHTTPRequestHandler):
    store: SessionStore = None  # injected by make_server
    static_dir: str | None = None

    # Route dispatch -----------------------------------------------------------

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def _dispatch(self, method: str) -> None:
        try:
            for verb, pattern, name in _ROUTES:
                match = pattern.match(self.path)
                if match and verb == method:
                    getattr(self, name)(*match.groups())
                    return
            if method == "GET" and self.static_dir and self._serve_static():
                return
            raise ServiceError(404, f"no route for {method} {self.path}")
        except ServiceError as exc:
            self._send(exc.status, {"error": exc.message})
        except Exception as exc:  # defensive: never crash the serving thread
            self._send(500, {"error": f"{type(exc).__name__}: {exc}"})

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        raw = self.rfile.read(length)
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ServiceError(400, f"request body is not valid JSON: {exc}")
        if not isinstance(doc, dict):
            raise ServiceError(400, "request body must be a JSON object")
        return doc

    def _send(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    # Handlers ----------------------------------------------------------------

    def create_session(self):
        session = self.store.create(self._body())
        self._send(201, session.view())

    def submit_action(self, session_id: str):
        body = self._body()
        action = body.get("action")
        if not isinstance(action, str):
            raise ServiceError(
                400, f"missing action; legal actions: {', '.join(ACTIONS)}")
        session = self.store.get(session_id)
        self._send(200, session.apply_action(action))

    def advance_phase(self, session_id: str):
        session = self.store.get(session_id)
        self._send(200, session.advance())

    def get_session(self, session_id: str):
        session = self.store.get(session_id)
        with session.lock:
            self._send(200, session.view())

    def export_session(self, session_id: str):
        self._send(200, self.store.export(session_id))

    def get_maze(self, maze_id: str):
        try:
            maze = library.get_maze(maze_id)
        except KeyError as exc:
            raise ServiceError(404, str(exc))
        self._send(200, {"id": maze_id, "width": maze.width, "height": maze.height,
                         "text": library.maze_text(maze_id)})

    def health(self):
        self._send(200, {"ok": True})

    def _serve_static(self) -> bool:
        rel = self.path.lstrip("/") or "index.html"
        rel = os.path.normpath(rel)
        if rel.startswith(".."):
            return False
        full = os.path.join(self.static_dir, rel)
        if not os.path.isfile(full):
            return False
        ext = os.path.splitext(full)[1]
        with open(full, "rb") as fh:
            body = fh.read()
        self.send_response(200)
        self.send_header("Content-Type", _STATIC_TYPES.get(ext, "application/octet-stream"))
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)
        return True


def make_server(host: str, port: int, data_dir: str,
                static_dir: str | None = None) -> ThreadingHTTPServer:
    handler = type("BoundSessionHandler", (SessionHandler,),
                   {"store": SessionStore(data_dir), "static_dir": static_dir})
    return ThreadingHTTPServer((host, port), handler)


def serve_forever(host: str, port: int, data_dir: str,
                  static_dir: str | None = None) -> None:
    server = make_server(host, port, data_dir, static_dir)
    print(f"explab session service on http://{host}:{server.server_address[1]} "
          f"(data: {data_dir})", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
