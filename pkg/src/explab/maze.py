"""Grid maze model: layout, sub-cell avatar movement, line-of-sight observations.

Mazes are rectangular grids of wall and floor cells, always enclosed by a
wall border. Coordinates are (x, y) with x the column and y the row; (0, 0)
is the top-left corner and y grows downward, so heading N means y - 1.

The ASCII exchange format uses one character per cell:

    #####       #  wall
    #S..#       .  floor
    #.#.#       S  start cell (avatar begins here, heading N)
    #..G#       G  goal cell (optional)
    #####       a  apple (local reward marker)
                B  floor cell whose every incident passage is sealed

Passages can also be sealed individually ("blocked edges"): the floor set is
unchanged but the avatar cannot cross the sealed boundary. Sealed passages
behave exactly like walls for movement and line of sight.
"""

from __future__ import annotations

import collections
from collections.abc import Iterable
from dataclasses import dataclass, field, replace

Cell = tuple[int, int]
Edge = tuple[Cell, Cell]

HEADINGS = ("N", "E", "S", "W")
DELTAS = {"N": (0, -1), "E": (1, 0), "S": (0, 1), "W": (-1, 0)}
CLOCKWISE = {"N": "E", "E": "S", "S": "W", "W": "N"}
LEFT_OF = {"N": "W", "E": "N", "S": "E", "W": "S"}
OPPOSITE = {"N": "S", "E": "W", "S": "N", "W": "E"}

ACTIONS = ("forward", "back", "strafe_left", "turn_right")

# Sub-steps per cell: one translation action covers about a fifth of a cell.
SUB_STEPS = 5

WALL_CH = "#"
FLOOR_CH = "."
START_CH = "S"
GOAL_CH = "G"
APPLE_CH = "a"
SEALED_CH = "B"
ALPHABET = frozenset(WALL_CH + FLOOR_CH + START_CH + GOAL_CH + APPLE_CH + SEALED_CH)


class MazeError(ValueError):
    """Base class for maze parsing and validation failures."""


class MazeParseError(MazeError):
    """The ASCII document is malformed (ragged, bad character, bad markers)."""


class MazeValidationError(MazeError):
    """The layout violates a structural invariant (border floor, unreachable goal, ...)."""


def edge(a: Cell, b: Cell) -> Edge:
    """Canonical key for the unordered passage between two cells."""
    return (a, b) if a <= b else (b, a)


def neighbor(cell: Cell, heading: str) -> Cell:
    dx, dy = DELTAS[heading]
    return (cell[0] + dx, cell[1] + dy)


def direction_between(a: Cell, b: Cell) -> str:
    """Heading that moves from cell a to adjacent cell b."""
    for h, (dx, dy) in DELTAS.items():
        if (a[0] + dx, a[1] + dy) == b:
            return h
    raise ValueError(f"cells {a} and {b} are not adjacent")


@dataclass(frozen=True)
class MazeSpec:
    """Immutable maze layout plus variant edits (sealed passages)."""

    width: int
    height: int
    floor: frozenset[Cell]
    start_cell: Cell
    start_heading: str = "N"
    goal: Cell | None = None
    apples: frozenset[Cell] = frozenset()
    blocked_edges: frozenset[Edge] = frozenset()
    id: str = ""

    def is_floor(self, cell: Cell) -> bool:
        return cell in self.floor

    def passable(self, a: Cell, b: Cell) -> bool:
        """True when a and b are adjacent floor cells with an unsealed passage."""
        if a not in self.floor or b not in self.floor:
            return False
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
            return False
        return edge(a, b) not in self.blocked_edges

    def passable_neighbors(self, cell: Cell) -> list[Cell]:
        """Adjacent cells reachable in one crossing, in N,E,S,W order."""
        out = []
        for h in HEADINGS:
            n = neighbor(cell, h)
            if self.passable(cell, n):
                out.append(n)
        return out


@dataclass(frozen=True)
class AvatarState:
    """Pose within the maze: cell, within-cell offset, and facing.

    sub_offset tracks progress along the current axis of travel in units of
    1/SUB_STEPS of a cell. Turning preserves it; a translation that pushes it
    past either end of the cell crosses into the adjacent cell.
    """

    cell: Cell
    sub_offset: int = 0
    heading: str = "N"


@dataclass(frozen=True)
class Observation:
    """What the avatar can see from its current cell (fog-of-war source)."""

    current_cell: Cell
    heading: str
    local_walls: dict[str, bool] = field(compare=False)  # heading -> passable
    visible_cells: frozenset[Cell] = frozenset()
    on_goal: bool = False
    apples_visible: frozenset[Cell] = frozenset()


def start_state(maze: MazeSpec) -> AvatarState:
    return AvatarState(cell=maze.start_cell, sub_offset=0, heading=maze.start_heading)


def validate_maze(maze: MazeSpec) -> None:
    """Raise MazeValidationError unless the layout invariants all hold."""
    if maze.width < 3 or maze.height < 3:
        raise MazeValidationError("maze must be at least 3x3 to fit a wall border")
    for (x, y) in maze.floor:
        if not (0 <= x < maze.width and 0 <= y < maze.height):
            raise MazeValidationError(f"floor cell {(x, y)} outside the grid")
        if x in (0, maze.width - 1) or y in (0, maze.height - 1):
            raise MazeValidationError(f"floor cell {(x, y)} on the border; mazes are wall-enclosed")
    if maze.start_cell not in maze.floor:
        raise MazeValidationError(f"start cell {maze.start_cell} is not floor")
    if maze.start_heading not in HEADINGS:
        raise MazeValidationError(f"bad start heading {maze.start_heading!r}")
    if maze.goal is not None and maze.goal not in maze.floor:
        raise MazeValidationError(f"goal cell {maze.goal} is not floor")
    if not maze.apples <= maze.floor:
        raise MazeValidationError(f"apples off the floor: {sorted(maze.apples - maze.floor)}")
    for a, b in maze.blocked_edges:
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
            raise MazeValidationError(f"blocked edge {a}-{b} does not join adjacent cells")
        if a not in maze.floor or b not in maze.floor:
            raise MazeValidationError(f"blocked edge {a}-{b} does not join floor cells")
    if maze.goal is not None and maze.goal not in reachable_cells(maze):
        raise MazeValidationError(f"goal {maze.goal} unreachable from start {maze.start_cell}")


def parse_maze(text: str, maze_id: str = "") -> MazeSpec:
    """Parse an ASCII maze document into a validated MazeSpec.

    A `B` cell is floor with every incident passage sealed; everything else
    follows the module-level alphabet. Exactly one `S`, at most one `G`.
    """
    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MazeParseError("empty maze document")
    width = len(lines[0])
    if any(len(line) != width for line in lines):
        raise MazeParseError("ragged grid: lines have unequal length")
    height = len(lines)

    floor: set[Cell] = set()
    sealed_cells: set[Cell] = set()
    apples: set[Cell] = set()
    starts: list[Cell] = []
    goals: list[Cell] = []
    for y, line in enumerate(lines):
        for x, ch in enumerate(line):
            if ch not in ALPHABET:
                raise MazeParseError(f"unknown character {ch!r} at {(x, y)}")
            if ch == WALL_CH:
                continue
            floor.add((x, y))
            if ch == START_CH:
                starts.append((x, y))
            elif ch == GOAL_CH:
                goals.append((x, y))
            elif ch == APPLE_CH:
                apples.add((x, y))
            elif ch == SEALED_CH:
                sealed_cells.add((x, y))
    if len(starts) == 0:
        raise MazeParseError("no start cell (exactly one 'S' required)")
    if len(starts) > 1:
        raise MazeParseError(f"multiple starts at {starts}")
    if len(goals) > 1:
        raise MazeParseError(f"multiple goals at {goals}")

    blocked: set[Edge] = set()
    for cell in sealed_cells:
        for h in HEADINGS:
            n = neighbor(cell, h)
            if n in floor:
                blocked.add(edge(cell, n))

    maze = MazeSpec(
        width=width,
        height=height,
        floor=frozenset(floor),
        start_cell=starts[0],
        start_heading="N",
        goal=goals[0] if goals else None,
        apples=frozenset(apples),
        blocked_edges=frozenset(blocked),
        id=maze_id,
    )
    validate_maze(maze)
    return maze


def render_maze(maze: MazeSpec) -> str:
    """Render a MazeSpec back to the ASCII format (inverse of parse_maze).

    Sealed passages are only expressible as `B` cells (all passages sealed);
    a maze with partially sealed cells cannot be rendered and raises.
    """
    fully_sealed: set[Cell] = set()
    representable: set[Edge] = set()
    for cell in maze.floor:
        incident = [edge(cell, neighbor(cell, h)) for h in HEADINGS
                    if neighbor(cell, h) in maze.floor]
        if incident and all(e in maze.blocked_edges for e in incident):
            fully_sealed.add(cell)
            representable.update(incident)
    if maze.blocked_edges - representable:
        raise MazeError("blocked edges not representable as sealed cells in the ASCII format")

    rows = []
    for y in range(maze.height):
        row = []
        for x in range(maze.width):
            cell = (x, y)
            if cell not in maze.floor:
                row.append(WALL_CH)
            elif cell == maze.start_cell:
                row.append(START_CH)
            elif cell == maze.goal:
                row.append(GOAL_CH)
            elif cell in maze.apples:
                row.append(APPLE_CH)
            elif cell in fully_sealed:
                row.append(SEALED_CH)
            else:
                row.append(FLOOR_CH)
        rows.append("".join(row))
    return "\n".join(rows) + "\n"


def step(maze: MazeSpec, state: AvatarState, action: str, sub_steps: int = SUB_STEPS) -> AvatarState:
    """Apply one primitive action; collisions leave the state unchanged.

    forward/back move one sub-step along the heading axis; strafe_left moves
    one sub-step toward the cell on the avatar's left (the shared offset is
    reinterpreted along that axis); turn_right rotates 90 degrees clockwise in
    place. A translation crossing the cell boundary enters the adjacent cell
    when the passage is open, otherwise the whole move is a silent no-op.
    """
    if action == "turn_right":
        return replace(state, heading=CLOCKWISE[state.heading])
    if action == "forward":
        direction, delta = state.heading, 1
    elif action == "back":
        direction, delta = OPPOSITE[state.heading], -1
    elif action == "strafe_left":
        direction, delta = LEFT_OF[state.heading], 1
    else:
        raise ValueError(f"unknown action {action!r}; expected one of {ACTIONS}")

    off = state.sub_offset + delta
    if 0 <= off < sub_steps:
        return replace(state, sub_offset=off)
    target = neighbor(state.cell, direction)
    if not maze.passable(state.cell, target):
        return state
    return replace(state, cell=target, sub_offset=0 if delta > 0 else sub_steps - 1)


def observe(maze: MazeSpec, state: AvatarState) -> Observation:
    """Line-of-sight view: ray-march each axis until a wall or sealed passage."""
    cur = state.cell
    visible = {cur}
    local_walls = {}
    for h in HEADINGS:
        local_walls[h] = maze.passable(cur, neighbor(cur, h))
        c = cur
        while maze.passable(c, neighbor(c, h)):
            c = neighbor(c, h)
            visible.add(c)
    return Observation(
        current_cell=cur,
        heading=state.heading,
        local_walls=local_walls,
        visible_cells=frozenset(visible),
        on_goal=maze.goal is not None and cur == maze.goal,
        apples_visible=maze.apples & frozenset(visible),
    )


def reachable_cells(maze: MazeSpec) -> frozenset[Cell]:
    """Breadth-first flood fill from the start, respecting sealed passages."""
    seen = {maze.start_cell}
    queue = collections.deque([maze.start_cell])
    while queue:
        c = queue.popleft()
        for n in maze.passable_neighbors(c):
            if n not in seen:
                seen.add(n)
                queue.append(n)
    return frozenset(seen)


def distances_from(maze: MazeSpec, origin: Cell) -> dict[Cell, int]:
    """BFS distance (in crossings) from origin to every reachable cell."""
    dist = {origin: 0}
    queue = collections.deque([origin])
    while queue:
        c = queue.popleft()
        for n in maze.passable_neighbors(c):
            if n not in dist:
                dist[n] = dist[c] + 1
                queue.append(n)
    return dist


def shortest_path(maze: MazeSpec, a: Cell, b: Cell) -> list[Cell]:
    """One deterministic shortest path a..b (ties resolved in N,E,S,W order)."""
    dist = distances_from(maze, b)
    if a not in dist:
        raise MazeValidationError(f"no path from {a} to {b}")
    path = [a]
    c = a
    while c != b:
        for n in maze.passable_neighbors(c):
            if dist[n] == dist[c] - 1:
                c = n
                break
        path.append(c)
    return path


def apply_blocked_variant(maze: MazeSpec, edits: Iterable[Edge]) -> MazeSpec:
    """Seal the given passages and re-validate (the goal must stay reachable)."""
    canon = {edge(a, b) for a, b in edits}
    variant = replace(maze, blocked_edges=maze.blocked_edges | frozenset(canon))
    validate_maze(variant)
    return variant


def propose_blocked_edges(maze: MazeSpec) -> frozenset[Edge]:
    """Choose passage seals that cut every most-direct start-goal route.

    Seals edges of a current shortest path, one at a time, until the
    start-goal distance strictly exceeds the unsealed distance; every seal
    must leave the goal reachable (the detour route survives). Deterministic.
    """
    if maze.goal is None:
        raise MazeValidationError("maze has no goal; nothing to block")
    base = distances_from(maze, maze.start_cell).get(maze.goal)
    if base is None:
        raise MazeValidationError("goal unreachable; cannot build a blocked variant")
    current = maze
    edits: set[Edge] = set()
    while distances_from(current, maze.start_cell).get(maze.goal) == base:
        path = shortest_path(current, maze.start_cell, maze.goal)
        # Seal as close to the goal as possible: the block should be found
        # late, after committing to the direct route.
        for a, b in reversed(list(zip(path, path[1:]))):
            trial = replace(current, blocked_edges=current.blocked_edges | {edge(a, b)})
            if maze.goal in reachable_cells(trial):
                edits.add(edge(a, b))
                current = trial
                break
        else:
            raise MazeValidationError("no detour survives sealing the direct route")
    return frozenset(edits)
