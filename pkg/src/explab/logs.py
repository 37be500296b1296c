"""Trajectory logs: the shared pose-record format for humans and agents.

A log is the full pose history of one session phase. The first record is the
phase's opening pose (action "start", t_ms 0 relative to nothing having
happened yet); every later record holds the action taken and the pose it
produced. Timestamps are milliseconds since session start, so two runs of the
same seeded agent produce byte-identical logs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .maze import AvatarState, MazeSpec, step

START_ACTION = "start"

RECORD_FIELDS = ("t_ms", "action", "cell_x", "cell_y", "heading", "sub_offset")


@dataclass(frozen=True)
class TrajectoryRecord:
    t_ms: int
    action: str
    cell_x: int
    cell_y: int
    heading: str
    sub_offset: int

    def state(self) -> AvatarState:
        return AvatarState(cell=(self.cell_x, self.cell_y),
                           sub_offset=self.sub_offset, heading=self.heading)

    def to_json(self) -> str:
        # Fixed key order keeps serialized logs byte-comparable across runs.
        payload = {name: getattr(self, name) for name in RECORD_FIELDS}
        return json.dumps(payload, separators=(",", ":"))


def record_from_state(t_ms: int, action: str, state: AvatarState) -> TrajectoryRecord:
    return TrajectoryRecord(t_ms=t_ms, action=action, cell_x=state.cell[0],
                            cell_y=state.cell[1], heading=state.heading,
                            sub_offset=state.sub_offset)


@dataclass
class TrajectoryLog:
    records: list[TrajectoryRecord] = field(default_factory=list)

    def append(self, t_ms: int, action: str, state: AvatarState) -> None:
        self.records.append(record_from_state(t_ms, action, state))

    def actions(self) -> list[str]:
        """The raw action sequence, excluding the opening pose record."""
        return [r.action for r in self.records if r.action != START_ACTION]

    def duration_ms(self) -> int:
        if len(self.records) < 2:
            return 0
        return self.records[-1].t_ms - self.records[0].t_ms

    def to_jsonl(self) -> str:
        return "".join(r.to_json() + "\n" for r in self.records)


def parse_record(line: str) -> TrajectoryRecord:
    raw = json.loads(line)
    missing = [name for name in RECORD_FIELDS if name not in raw]
    if missing:
        raise ValueError(f"trajectory record missing fields {missing}")
    return TrajectoryRecord(t_ms=int(raw["t_ms"]), action=str(raw["action"]),
                            cell_x=int(raw["cell_x"]), cell_y=int(raw["cell_y"]),
                            heading=str(raw["heading"]), sub_offset=int(raw["sub_offset"]))


def parse_jsonl(text: str) -> TrajectoryLog:
    records = [parse_record(line) for line in text.splitlines() if line.strip()]
    return TrajectoryLog(records=records)


def replay(maze: MazeSpec, log: TrajectoryLog) -> TrajectoryLog:
    """Re-simulate a log's action sequence from its opening pose.

    Returns a fresh log with identical actions and timestamps but poses
    recomputed through the simulator; comparing it to the original verifies
    that a recorded session is reproducible.
    """
    if not log.records:
        return TrajectoryLog()
    first = log.records[0]
    if first.action != START_ACTION:
        raise ValueError(f"log does not open with a {START_ACTION!r} record")
    state = first.state()
    out = TrajectoryLog(records=[first])
    for rec in log.records[1:]:
        state = step(maze, state, rec.action)
        out.append(rec.t_ms, rec.action, state)
    return out
