"""Exploration policies: depth-first, random, tabular Q-learning, count-bonus.

Policies decide at cell granularity (pick a passable neighbor or stop); a
motor layer expands each choice into the turn_right/forward primitives that
physically reach the neighbor. All knowledge comes from observations: a
policy only ever knows the passability of cells it has stood in, so sealed
passages are discovered by contact like everything else.
"""

from __future__ import annotations

import collections
import random
from dataclasses import dataclass, field

from .maze import (Cell, HEADINGS, MazeSpec, Observation, SUB_STEPS,
                   direction_between, neighbor)

AGENT_KINDS = ("dfs", "random", "qlearn", "countbonus")

# Distinguished signal to the protocol runner: exploration is exhausted.
DONE = "done"

QKey = tuple[Cell, str, str]  # (cell, arrival heading, move direction)


@dataclass(frozen=True)
class AgentConfig:
    kind: str
    seed: int = 0
    epsilon: float = 0.1
    alpha: float = 0.5
    gamma: float = 0.9
    beta: float = 1.0
    optimistic_init: float = 0.0

    def __post_init__(self):
        if self.kind not in AGENT_KINDS:
            raise ValueError(f"unknown agent kind {self.kind!r}; expected one of {AGENT_KINDS}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must be in [0, 1]")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must be in [0, 1)")
        if self.beta < 0.0:
            raise ValueError("beta must be non-negative")

    def to_kv(self) -> str:
        """Flat key=value block (CLI flags and batch manifests)."""
        pairs = [("kind", self.kind), ("seed", self.seed), ("epsilon", self.epsilon),
                 ("alpha", self.alpha), ("gamma", self.gamma), ("beta", self.beta),
                 ("optimistic_init", self.optimistic_init)]
        return "\n".join(f"{k}={v}" for k, v in pairs)

    @classmethod
    def from_kv(cls, text: str) -> "AgentConfig":
        fields_ = {}
        for token in text.split():
            if "=" not in token:
                raise ValueError(f"bad key=value token {token!r}")
            key, value = token.split("=", 1)
            fields_[key] = value
        kwargs: dict = {"kind": fields_.pop("kind", "")}
        for key, conv in (("seed", int), ("epsilon", float), ("alpha", float),
                          ("gamma", float), ("beta", float), ("optimistic_init", float)):
            if key in fields_:
                kwargs[key] = conv(fields_.pop(key))
        if fields_:
            raise ValueError(f"unknown agent config keys {sorted(fields_)}")
        return cls(**kwargs)


@dataclass
class AgentMemory:
    """Per-session agent state; grows monotonically within a maze."""

    visited: set[Cell] = field(default_factory=set)
    first_visit: list[Cell] = field(default_factory=list)
    adjacency: dict[Cell, tuple[Cell, ...]] = field(default_factory=dict)
    branch_stack: list[Cell] = field(default_factory=list)
    q_table: dict[QKey, float] = field(default_factory=dict)
    visit_counts: dict[Cell, int] = field(default_factory=dict)
    rng: random.Random = field(default_factory=random.Random)

    def note_cell(self, obs: Observation) -> None:
        """Record one cell entry: visitation, counts, observed passability."""
        cell = obs.current_cell
        self.visit_counts[cell] = self.visit_counts.get(cell, 0) + 1
        self.adjacency[cell] = tuple(
            neighbor(cell, h) for h in HEADINGS if obs.local_walls[h])
        if cell not in self.visited:
            self.visited.add(cell)
            self.first_visit.append(cell)
            self.branch_stack.append(cell)

    def has_unvisited_neighbor(self, cell: Cell) -> bool:
        return any(n not in self.visited for n in self.adjacency.get(cell, ()))


def fresh_memory(seed: int) -> AgentMemory:
    return AgentMemory(rng=random.Random(seed))


# --- cell-level policies -----------------------------------------------------

def dfs_next_cell(obs: Observation, memory: AgentMemory) -> Cell | None:
    """Depth-first choice: unvisited neighbor first (N,E,S,W order), else one
    step along a shortest known route toward the most recently discovered cell
    that still has an unvisited neighbor; None once nothing is left."""
    cur = obs.current_cell
    for h in HEADINGS:
        n = neighbor(cur, h)
        if obs.local_walls[h] and n not in memory.visited:
            return n
    stack = memory.branch_stack
    while stack and not memory.has_unvisited_neighbor(stack[-1]):
        stack.pop()
    if not stack:
        return None
    dist = _known_distances(memory, stack[-1])
    cur_d = dist.get(cur)
    if cur_d is None:
        return None  # disconnected knowledge; cannot happen for own trajectories
    for h in HEADINGS:
        n = neighbor(cur, h)
        if obs.local_walls[h] and dist.get(n) == cur_d - 1:
            return n
    return None


def _known_distances(memory: AgentMemory, origin: Cell) -> dict[Cell, int]:
    """BFS over the visited subgraph using observed passability only."""
    dist = {origin: 0}
    queue = collections.deque([origin])
    while queue:
        c = queue.popleft()
        for n in memory.adjacency.get(c, ()):
            if n in memory.visited and n not in dist:
                dist[n] = dist[c] + 1
                queue.append(n)
    return dist


def random_next_cell(obs: Observation, memory: AgentMemory) -> Cell | None:
    """Uniform seeded choice among passable neighbors."""
    options = [neighbor(obs.current_cell, h) for h in HEADINGS if obs.local_walls[h]]
    if not options:
        return None
    return memory.rng.choice(options)


def qlearn_next_cell(obs: Observation, memory: AgentMemory,
                     config: AgentConfig) -> Cell | None:
    """Epsilon-greedy over the tabular action values at (cell, heading)."""
    dirs = [h for h in HEADINGS if obs.local_walls[h]]
    if not dirs:
        return None
    h = _q_direction(memory, obs.current_cell, obs.heading, dirs,
                     config.epsilon, config.optimistic_init)
    return neighbor(obs.current_cell, h)


def _q_direction(memory: AgentMemory, cell: Cell, heading: str, dirs: list[str],
                 epsilon: float, init: float) -> str:
    if epsilon > 0 and memory.rng.random() < epsilon:
        return memory.rng.choice(dirs)
    qvals = {h: memory.q_table.get((cell, heading, h), init) for h in dirs}
    best_q = max(qvals.values())
    best = [h for h in dirs if qvals[h] == best_q]
    if len(best) == 1:
        return best[0]
    return memory.rng.choice(best)


def qlearn_update(memory: AgentMemory, cell: Cell, heading: str, direction: str,
                  reward: float, next_cell: Cell, next_heading: str, *,
                  alpha: float, gamma: float, optimistic_init: float = 0.0,
                  terminal: bool = False) -> None:
    """One-step tabular update: move Q(s,a) toward r + gamma * max_a' Q(s',a')."""
    key = (cell, heading, direction)
    current = memory.q_table.get(key, optimistic_init)
    if terminal:
        bootstrap = 0.0
    else:
        bootstrap = max(memory.q_table.get((next_cell, next_heading, h), optimistic_init)
                        for h in HEADINGS)
    memory.q_table[key] = current + alpha * (reward + gamma * bootstrap - current)


def countbonus_next_cell(obs: Observation, memory: AgentMemory,
                         config: AgentConfig) -> Cell | None:
    """Greedy on the visit-count bonus beta / sqrt(count + 1), N,E,S,W ties."""
    best: tuple[float, int] | None = None
    best_cell: Cell | None = None
    for i, h in enumerate(HEADINGS):
        if not obs.local_walls[h]:
            continue
        n = neighbor(obs.current_cell, h)
        bonus = config.beta / (memory.visit_counts.get(n, 0) + 1) ** 0.5
        rank = (-bonus, i)
        if best is None or rank < best:
            best = rank
            best_cell = n
    return best_cell


# --- motor layer -------------------------------------------------------------

def motor_actions(heading: str, current: Cell, target: Cell,
                  sub_steps: int = SUB_STEPS) -> list[str]:
    """Primitive sequence reaching an adjacent cell from a cell-entry pose."""
    d = direction_between(current, target)
    turns = (HEADINGS.index(d) - HEADINGS.index(heading)) % 4
    return ["turn_right"] * turns + ["forward"] * sub_steps


class Agent:
    """A seeded policy plus motor queue; emits one primitive per act() call."""

    def __init__(self, config: AgentConfig):
        self.config = config
        self.memory = fresh_memory(config.seed)
        self._pending: collections.deque[str] = collections.deque()

    def reset_between_mazes(self) -> None:
        """Wipe maze-specific memory; learned action values transfer."""
        q_table = self.memory.q_table
        rng = self.memory.rng
        self.memory = AgentMemory(q_table=q_table, rng=rng)
        self._pending.clear()

    def act(self, obs: Observation) -> str:
        """Next primitive action, or DONE when exploration is exhausted."""
        if self._pending:
            return self._pending.popleft()
        self.memory.note_cell(obs)
        target = self._choose(obs)
        if target is None:
            return DONE
        self._pending.extend(motor_actions(obs.heading, obs.current_cell, target))
        return self._pending.popleft()

    def _choose(self, obs: Observation) -> Cell | None:
        kind = self.config.kind
        if kind == "dfs":
            return dfs_next_cell(obs, self.memory)
        if kind == "random":
            return random_next_cell(obs, self.memory)
        if kind == "qlearn":
            return qlearn_next_cell(obs, self.memory, self.config)
        return countbonus_next_cell(obs, self.memory, self.config)

    def learn(self, cell: Cell, heading: str, direction: str, reward: float,
              next_cell: Cell, next_heading: str, terminal: bool = False) -> None:
        """Feed one cell transition back to the policy (Q-learning only)."""
        if self.config.kind != "qlearn":
            return
        qlearn_update(self.memory, cell, heading, direction, reward,
                      next_cell, next_heading, alpha=self.config.alpha,
                      gamma=self.config.gamma,
                      optimistic_init=self.config.optimistic_init,
                      terminal=terminal)


# --- episodic training utility ----------------------------------------------

def train_qlearning(maze: MazeSpec, config: AgentConfig, episodes: int,
                    max_steps: int = 500, goal_reward: float = 1.0,
                    step_cost: float = -0.001) -> AgentMemory:
    """Run seeded goal-reaching episodes at cell granularity.

    A lab utility (not an experiment phase): the learner restarts at the
    start cell each episode and episodes end on goal entry or the step cap.
    """
    if maze.goal is None:
        raise ValueError("training needs a maze with a goal")
    memory = fresh_memory(config.seed)
    for _ in range(episodes):
        cell, heading = maze.start_cell, maze.start_heading
        for _ in range(max_steps):
            dirs = [h for h in HEADINGS if maze.passable(cell, neighbor(cell, h))]
            if not dirs:
                break
            d = _q_direction(memory, cell, heading, dirs, config.epsilon,
                             config.optimistic_init)
            nxt = neighbor(cell, d)
            terminal = nxt == maze.goal
            reward = step_cost + (goal_reward if terminal else 0.0)
            qlearn_update(memory, cell, heading, d, reward, nxt, d,
                          alpha=config.alpha, gamma=config.gamma,
                          optimistic_init=config.optimistic_init, terminal=terminal)
            cell, heading = nxt, d
            if terminal:
                break
    return memory


def greedy_goal_path(maze: MazeSpec, memory: AgentMemory, config: AgentConfig,
                     max_steps: int = 10_000) -> list[Cell]:
    """Follow argmax Q from the start; stops at the goal or the step cap."""
    if maze.goal is None:
        raise ValueError("greedy evaluation needs a maze with a goal")
    cell, heading = maze.start_cell, maze.start_heading
    path = [cell]
    for _ in range(max_steps):
        if cell == maze.goal:
            break
        dirs = [h for h in HEADINGS if maze.passable(cell, neighbor(cell, h))]
        if not dirs:
            break
        qvals = {h: memory.q_table.get((cell, heading, h), config.optimistic_init)
                 for h in dirs}
        best_q = max(qvals.values())
        d = next(h for h in dirs if qvals[h] == best_q)
        cell, heading = neighbor(cell, d), d
        path.append(cell)
    return path
