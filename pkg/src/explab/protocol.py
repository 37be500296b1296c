"""Experiment protocols: phase sequences over maze variants.

Experiment 1 runs three phases on one layout: free exploration with the goal
hidden, then goal seeking, then goal seeking with the direct route sealed.
Experiment 2 runs three phases (local-reward or free exploration, goal,
blocked) on each of two maze designs in a row; the second design tests
generalization. Reward semantics live here: apples are consumed on first
entry and pay out once, goal entry ends a goal phase, and every cell
transition costs a small step penalty in the learner's update signal.

Subject memory persists across the phases of one maze and is wiped between
the two designs of experiment 2, except for learned action values, which
transfer.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .agents import Agent, AgentConfig, DONE
from .library import get_maze
from .logs import START_ACTION, TrajectoryLog, parse_jsonl
from .maze import (Cell, Edge, MazeSpec, SUB_STEPS, apply_blocked_variant,
                   direction_between, edge, observe, parse_maze,
                   propose_blocked_edges, reachable_cells, render_maze,
                   shortest_path, start_state, step)


class ProtocolError(ValueError):
    """Invalid experiment configuration (bad condition, missing goal, ...)."""


# Phase kinds and outcomes.
EXPLORE, GOAL, BLOCKED = "explore", "goal", "blocked"
GOAL_REACHED, BUDGET_EXHAUSTED, DONE_OUTCOME = "goal_reached", "budget_exhausted", "done"

DEFAULT_BUDGET_FACTOR = 10


@dataclass(frozen=True)
class RewardSchedule:
    goal: float = 1.0
    apple: float = 0.1
    step_cost: float = -0.001


@dataclass(frozen=True)
class PhasePlan:
    label: str                 # "A".."C" for experiment 1, "1".."6" for experiment 2
    kind: str                  # explore | goal | blocked
    maze: MazeSpec             # fully-built variant for this phase
    base_maze_id: str
    budget: int
    maze_index: int            # 1 or 2 (experiment 2's second design)
    phase_in_maze: int         # 1..3
    reset_memory: bool = False  # wipe non-learned memory before this phase

    @property
    def goal_active(self) -> bool:
        return self.kind != EXPLORE and self.maze.goal is not None


@dataclass(frozen=True)
class ExperimentPlan:
    experiment: int
    condition: str             # "standard" (exp1) or "dense" / "sparse" (exp2)
    maze_ids: tuple[str, ...]
    phases: tuple[PhasePlan, ...]
    rewards: RewardSchedule = RewardSchedule()


@dataclass(frozen=True)
class RewardEvent:
    t_ms: int
    cell: Cell
    kind: str                  # "apple" | "goal"
    value: float


@dataclass
class PhaseResult:
    plan: PhasePlan
    outcome: str | None        # None while a live phase is still running
    transitions: int
    log: TrajectoryLog
    consumed: list[Cell] = field(default_factory=list)
    events: list[RewardEvent] = field(default_factory=list)

    @property
    def duration_ms(self) -> int:
        return self.log.duration_ms()


@dataclass
class SessionLog:
    session_id: str
    subject: dict              # {"type": "agent", "config": {...}} or {"type": "human", "tag": ...}
    plan: ExperimentPlan
    phases: list[PhaseResult] = field(default_factory=list)

    @property
    def subject_name(self) -> str:
        if self.subject.get("type") == "agent":
            return self.subject["config"]["kind"]
        return "human"


def default_budget(maze: MazeSpec) -> int:
    return DEFAULT_BUDGET_FACTOR * len(reachable_cells(maze))


def apple_trail(maze: MazeSpec) -> frozenset[Cell]:
    """Local-reward trail: every cell of the most direct start-goal route."""
    if maze.goal is None:
        raise ProtocolError("an apple trail needs a maze with a goal")
    trail = shortest_path(maze, maze.start_cell, maze.goal)[1:-1]
    if not trail:
        raise ProtocolError("dense condition with no apples: start and goal adjacent")
    return frozenset(trail)


def build_experiment1_plan(maze: MazeSpec, budget: int | None = None,
                           rewards: RewardSchedule = RewardSchedule(),
                           blocked: frozenset[Edge] | None = None) -> ExperimentPlan:
    """Free exploration (goal hidden), goal search, then blocked goal search."""
    if maze.goal is None:
        raise ProtocolError("experiment 1 needs a maze with a goal")
    edits = frozenset(edge(a, b) for a, b in blocked) if blocked is not None \
        else propose_blocked_edges(maze)
    blocked_maze = apply_blocked_variant(maze, edits)
    base = replace(maze, apples=frozenset())
    phases = []
    for label, kind, variant in (("A", EXPLORE, replace(base, goal=None)),
                                 ("B", GOAL, base),
                                 ("C", BLOCKED, replace(blocked_maze, apples=frozenset()))):
        phases.append(PhasePlan(
            label=label, kind=kind, maze=variant, base_maze_id=maze.id,
            budget=budget if budget is not None else default_budget(variant),
            maze_index=1, phase_in_maze={"A": 1, "B": 2, "C": 3}[label]))
    return ExperimentPlan(experiment=1, condition="standard", maze_ids=(maze.id,),
                          phases=tuple(phases), rewards=rewards)


def build_experiment2_plan(maze_pair: tuple[MazeSpec, MazeSpec], condition: str,
                           budget: int | None = None,
                           rewards: RewardSchedule = RewardSchedule()) -> ExperimentPlan:
    """Dense (apple trail) or sparse (free) first phase, goal, then blocked;
    the whole sequence repeats on a second maze design."""
    if condition not in ("dense", "sparse"):
        raise ProtocolError(f"unknown experiment 2 condition {condition!r}")
    phases = []
    for maze_index, maze in enumerate(maze_pair, start=1):
        if maze.goal is None:
            raise ProtocolError(f"experiment 2 maze {maze.id!r} needs a goal")
        base = replace(maze, apples=frozenset())
        blocked_maze = replace(apply_blocked_variant(maze, propose_blocked_edges(maze)),
                               apples=frozenset())
        if condition == "dense":
            first = replace(base, apples=apple_trail(base))
            first_kind = GOAL
        else:
            first = replace(base, goal=None)
            first_kind = EXPLORE
        for phase_in_maze, (kind, variant) in enumerate(
                ((first_kind, first), (GOAL, base), (BLOCKED, blocked_maze)), start=1):
            label = str((maze_index - 1) * 3 + phase_in_maze)
            phases.append(PhasePlan(
                label=label, kind=kind, maze=variant, base_maze_id=maze.id,
                budget=budget if budget is not None else default_budget(variant),
                maze_index=maze_index, phase_in_maze=phase_in_maze,
                reset_memory=(maze_index == 2 and phase_in_maze == 1)))
    return ExperimentPlan(experiment=2, condition=condition,
                          maze_ids=tuple(m.id for m in maze_pair),
                          phases=tuple(phases), rewards=rewards)


# --- running agent sessions ---------------------------------------------------

def run_session(config: AgentConfig, plan: ExperimentPlan, session_id: str) -> SessionLog:
    """Drive one agent through every phase of a plan.

    Timestamps are a logical clock (one tick per primitive action) running
    across the whole session, so phase logs never overlap and reruns are
    byte-identical.
    """
    agent = Agent(config)
    session = SessionLog(session_id=session_id,
                         subject={"type": "agent", "config": _config_dict(config)},
                         plan=plan)
    clock = 0
    for phase in plan.phases:
        if phase.reset_memory:
            agent.reset_between_mazes()
        result, clock = _run_phase(agent, phase, plan.rewards, clock)
        session.phases.append(result)
    return session


def _run_phase(agent: Agent, phase: PhasePlan, rewards: RewardSchedule,
               clock: int) -> tuple[PhaseResult, int]:
    maze = phase.maze
    state = start_state(maze)
    log = TrajectoryLog()
    log.append(clock, START_ACTION, state)
    result = PhaseResult(plan=phase, outcome=None, transitions=0, log=log)

    if phase.goal_active and state.cell == maze.goal:
        result.outcome = GOAL_REACHED
        return result, clock

    arrival_heading = maze.start_heading
    # Safety net over the cell budget: a transition takes at most 3 turns plus
    # SUB_STEPS forwards, so a well-formed agent can never hit this cap.
    max_primitives = phase.budget * (SUB_STEPS + 4) + 256
    primitives = 0
    while result.transitions < phase.budget and primitives < max_primitives:
        action = agent.act(observe(maze, state))
        if action == DONE:
            result.outcome = DONE_OUTCOME
            break
        primitives += 1
        clock += 1
        new = step(maze, state, action)
        log.append(clock, action, new)
        if new.cell != state.cell:
            result.transitions += 1
            direction = direction_between(state.cell, new.cell)
            reward = rewards.step_cost
            if new.cell in maze.apples:
                maze = replace(maze, apples=maze.apples - {new.cell})
                result.consumed.append(new.cell)
                result.events.append(RewardEvent(clock, new.cell, "apple", rewards.apple))
                reward += rewards.apple
            terminal = phase.goal_active and new.cell == maze.goal
            if terminal:
                result.events.append(RewardEvent(clock, new.cell, "goal", rewards.goal))
                reward += rewards.goal
            agent.learn(state.cell, arrival_heading, direction, reward,
                        new.cell, direction, terminal=terminal)
            arrival_heading = direction
            if terminal:
                result.outcome = GOAL_REACHED
                state = new
                break
        state = new
    if result.outcome is None:
        result.outcome = BUDGET_EXHAUSTED
    return result, clock


def _config_dict(config: AgentConfig) -> dict:
    return {"kind": config.kind, "seed": config.seed, "epsilon": config.epsilon,
            "alpha": config.alpha, "gamma": config.gamma, "beta": config.beta,
            "optimistic_init": config.optimistic_init}


# --- session persistence --------------------------------------------------------

META_FILE = "meta"
EVENTS_FILE = "events.jsonl"


def phase_file(label: str) -> str:
    return f"phase-{label}.jsonl"


def _phase_meta(phase: PhasePlan) -> dict:
    base = phase.maze
    # Store the floor layout alone; goal visibility, apples and seals are
    # recorded as overrides so any variant rebuilds losslessly.
    return {
        "label": phase.label,
        "kind": phase.kind,
        "maze_id": phase.base_maze_id,
        "maze_text": render_maze(replace(base, apples=frozenset(),
                                         blocked_edges=frozenset())),
        "goal": list(base.goal) if base.goal is not None else None,
        "apples": sorted(list(c) for c in base.apples),
        "blocked_edges": sorted([list(a), list(b)] for a, b in base.blocked_edges),
        "budget": phase.budget,
        "maze_index": phase.maze_index,
        "phase_in_maze": phase.phase_in_maze,
        "reset_memory": phase.reset_memory,
    }


def _phase_from_meta(raw: dict) -> PhasePlan:
    base = parse_maze(raw["maze_text"], raw["maze_id"])
    goal = tuple(raw["goal"]) if raw["goal"] is not None else None
    maze = replace(base, goal=goal,
                   apples=frozenset(tuple(c) for c in raw["apples"]),
                   blocked_edges=base.blocked_edges | frozenset(
                       edge(tuple(a), tuple(b)) for a, b in raw["blocked_edges"]))
    return PhasePlan(label=raw["label"], kind=raw["kind"], maze=maze,
                     base_maze_id=raw["maze_id"], budget=raw["budget"],
                     maze_index=raw["maze_index"], phase_in_maze=raw["phase_in_maze"],
                     reset_memory=raw["reset_memory"])


def session_meta(session: SessionLog) -> dict:
    plan = session.plan
    return {
        "session_id": session.session_id,
        "subject": session.subject,
        "experiment": plan.experiment,
        "condition": plan.condition,
        "maze_ids": list(plan.maze_ids),
        "rewards": {"goal": plan.rewards.goal, "apple": plan.rewards.apple,
                    "step_cost": plan.rewards.step_cost},
        "phases": [_phase_meta(p) for p in plan.phases],
    }


def phase_completion_event(result: PhaseResult) -> dict:
    return {
        "type": "phase_completed",
        "label": result.plan.label,
        "outcome": result.outcome,
        "transitions": result.transitions,
        "duration_ms": result.duration_ms,
        "consumed": [list(c) for c in result.consumed],
        "reward_events": [{"t_ms": e.t_ms, "cell": list(e.cell), "kind": e.kind,
                           "value": e.value} for e in result.events],
    }


def write_session(session: SessionLog, out_dir: str) -> str:
    """Persist a finished session: meta, one jsonl per phase, and events."""
    path = os.path.join(out_dir, session.session_id)
    os.makedirs(path, exist_ok=True)
    with open(os.path.join(path, META_FILE), "w") as fh:
        json.dump(session_meta(session), fh, indent=1)
        fh.write("\n")
    events = []
    for result in session.phases:
        with open(os.path.join(path, phase_file(result.plan.label)), "w") as fh:
            fh.write(result.log.to_jsonl())
        events.append({"type": "phase_started", "label": result.plan.label})
        events.append(phase_completion_event(result))
    events.append({"type": "session_finished"})
    with open(os.path.join(path, EVENTS_FILE), "w") as fh:
        for event in events:
            fh.write(json.dumps(event, separators=(",", ":")) + "\n")
    return path


def read_session(path: str) -> SessionLog:
    """Load a persisted session directory back into a SessionLog.

    Phases without a completion event (a live session caught mid-phase) come
    back with outcome None.
    """
    with open(os.path.join(path, META_FILE)) as fh:
        meta = json.load(fh)
    phases = [_phase_from_meta(raw) for raw in meta["phases"]]
    plan = ExperimentPlan(
        experiment=meta["experiment"], condition=meta["condition"],
        maze_ids=tuple(meta["maze_ids"]), phases=tuple(phases),
        rewards=RewardSchedule(**meta["rewards"]))
    session = SessionLog(session_id=meta["session_id"], subject=meta["subject"],
                         plan=plan)

    completions: dict[str, dict] = {}
    events_path = os.path.join(path, EVENTS_FILE)
    if os.path.exists(events_path):
        with open(events_path) as fh:
            for line in fh:
                if not line.strip():
                    continue
                event = json.loads(line)
                if event.get("type") == "phase_completed":
                    completions[event["label"]] = event

    for phase in phases:
        log_path = os.path.join(path, phase_file(phase.label))
        if not os.path.exists(log_path):
            continue
        with open(log_path) as fh:
            log = parse_jsonl(fh.read())
        done = completions.get(phase.label)
        result = PhaseResult(
            plan=phase,
            outcome=done["outcome"] if done else None,
            transitions=done["transitions"] if done
            else _count_transitions(log),
            log=log,
            consumed=[tuple(c) for c in done["consumed"]] if done else [],
            events=[RewardEvent(e["t_ms"], tuple(e["cell"]), e["kind"], e["value"])
                    for e in done["reward_events"]] if done else [])
        session.phases.append(result)
    return session


def _count_transitions(log: TrajectoryLog) -> int:
    cells = [(r.cell_x, r.cell_y) for r in log.records]
    return sum(1 for a, b in zip(cells, cells[1:]) if a != b)


def list_session_dirs(root: str) -> list[str]:
    out = []
    for name in sorted(os.listdir(root)):
        path = os.path.join(root, name)
        if os.path.isdir(path) and os.path.exists(os.path.join(path, META_FILE)):
            out.append(path)
    return out


# --- plan construction from selectors -------------------------------------------

def load_maze(ref: str) -> MazeSpec:
    """Resolve a maze reference: a library id or a path to an ASCII file."""
    if os.path.sep in ref or ref.endswith(".txt") or os.path.exists(ref):
        with open(ref) as fh:
            return parse_maze(fh.read(), os.path.splitext(os.path.basename(ref))[0])
    return get_maze(ref)


def build_plan(experiment: int, condition: str | None = None,
               maze_refs: tuple[str, ...] | None = None,
               budget: int | None = None,
               rewards: RewardSchedule = RewardSchedule()) -> ExperimentPlan:
    if experiment == 1:
        refs = maze_refs or ("exp1",)
        if len(refs) != 1:
            raise ProtocolError("experiment 1 takes exactly one maze")
        return build_experiment1_plan(load_maze(refs[0]), budget=budget, rewards=rewards)
    if experiment == 2:
        refs = maze_refs or ("exp2a", "exp2b")
        if len(refs) != 2:
            raise ProtocolError("experiment 2 takes a pair of mazes")
        pair = (load_maze(refs[0]), load_maze(refs[1]))
        return build_experiment2_plan(pair, condition or "sparse", budget=budget,
                                      rewards=rewards)
    raise ProtocolError(f"unknown experiment {experiment!r}; expected 1 or 2")


# --- batch running ----------------------------------------------------------------

@dataclass(frozen=True)
class BatchRow:
    index: int
    config: AgentConfig
    experiment: int
    condition: str | None
    maze_refs: tuple[str, ...] | None
    budget: int | None


@dataclass(frozen=True)
class BatchResult:
    index: int
    session_id: str | None
    path: str | None
    error: str | None


def parse_manifest(text: str) -> list[BatchRow]:
    """Line-oriented key=value records, one session per line; # comments."""
    rows = []
    for raw_line in text.splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        pairs = {}
        for token in line.split():
            if "=" not in token:
                raise ProtocolError(f"bad manifest token {token!r}")
            key, value = token.split("=", 1)
            pairs[key] = value
        experiment = int(pairs.pop("experiment", "1"))
        condition = pairs.pop("condition", None)
        budget = int(pairs.pop("budget")) if "budget" in pairs else None
        maze_refs: tuple[str, ...] | None = None
        if "maze" in pairs:
            maze_refs = (pairs.pop("maze"),)
        elif "mazes" in pairs:
            maze_refs = tuple(pairs.pop("mazes").split(","))
        config = AgentConfig.from_kv(" ".join(f"{k}={v}" for k, v in pairs.items()))
        rows.append(BatchRow(index=len(rows), config=config, experiment=experiment,
                             condition=condition, maze_refs=maze_refs, budget=budget))
    return rows


def _session_id_for(row: BatchRow) -> str:
    cond = row.condition or ("standard" if row.experiment == 1 else "sparse")
    return f"s{row.index:03d}-e{row.experiment}-{cond}-{row.config.kind}-seed{row.config.seed}"


def run_batch_row(row: BatchRow, out_dir: str) -> BatchResult:
    try:
        plan = build_plan(row.experiment, row.condition, row.maze_refs, row.budget)
        session = run_session(row.config, plan, _session_id_for(row))
        path = write_session(session, out_dir)
        return BatchResult(index=row.index, session_id=session.session_id,
                           path=path, error=None)
    except Exception as exc:  # per-row isolation: one bad row must not abort the batch
        return BatchResult(index=row.index, session_id=None, path=None,
                           error=f"{type(exc).__name__}: {exc}")


def batch_run(rows: list[BatchRow], out_dir: str, workers: int = 1) -> list[BatchResult]:
    os.makedirs(out_dir, exist_ok=True)
    if workers <= 1:
        results = [run_batch_row(row, out_dir) for row in rows]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_batch_row, rows, [out_dir] * len(rows)))
    return sorted(results, key=lambda r: r.index)
