"""Seeded maze generators for the property-test corpus and the CLI.

Layouts live on an odd-sized grid: logical rooms sit at odd (x, y)
coordinates and carving a passage turns the wall cell between two rooms into
floor. A perfect maze carves a uniform spanning tree (exactly one route
between any two rooms); a braided maze knocks down extra walls afterwards so
loops exist and detours are possible.
"""

from __future__ import annotations

import random

from .maze import Cell, MazeSpec, MazeError, distances_from, parse_maze

STYLES = ("perfect", "braided")

# Fraction of the leftover room-to-room walls removed when braiding.
BRAID_FRACTION = 0.15


def generate_maze_text(width: int, height: int, style: str = "perfect", seed: int = 0) -> str:
    """Generate an ASCII maze with start and goal at a maximal-distance pair."""
    if style not in STYLES:
        raise MazeError(f"unknown style {style!r}; expected one of {STYLES}")
    if width < 5 or height < 5 or width % 2 == 0 or height % 2 == 0:
        raise MazeError("width and height must be odd and at least 5")

    rng = random.Random(seed)
    rooms = [(x, y) for y in range(1, height, 2) for x in range(1, width, 2)]
    carved: set[Cell] = set(rooms)

    # Randomized depth-first spanning tree over the rooms.
    start = rooms[rng.randrange(len(rooms))]
    visited = {start}
    stack = [start]
    while stack:
        cx, cy = stack[-1]
        options = []
        for dx, dy in ((0, -2), (2, 0), (0, 2), (-2, 0)):
            nxt = (cx + dx, cy + dy)
            if 1 <= nxt[0] < width - 1 and 1 <= nxt[1] < height - 1 and nxt not in visited:
                options.append(nxt)
        if options:
            nxt = options[rng.randrange(len(options))]
            carved.add(((cx + nxt[0]) // 2, (cy + nxt[1]) // 2))
            visited.add(nxt)
            stack.append(nxt)
        else:
            stack.pop()

    if style == "braided":
        leftover = []
        for (x, y) in rooms:
            for dx, dy in ((2, 0), (0, 2)):
                other = (x + dx, y + dy)
                wall = (x + dx // 2, y + dy // 2)
                if other in visited and wall not in carved:
                    leftover.append(wall)
        leftover.sort()
        rng.shuffle(leftover)
        n_loops = max(1, int(len(leftover) * BRAID_FRACTION))
        carved.update(leftover[:n_loops])

    start_cell, goal_cell = _farthest_pair(width, height, carved)
    rows = []
    for y in range(height):
        row = []
        for x in range(width):
            if (x, y) == start_cell:
                row.append("S")
            elif (x, y) == goal_cell:
                row.append("G")
            elif (x, y) in carved:
                row.append(".")
            else:
                row.append("#")
        rows.append("".join(row))
    return "\n".join(rows) + "\n"


def generate_maze(width: int, height: int, style: str = "perfect", seed: int = 0,
                  maze_id: str = "") -> MazeSpec:
    text = generate_maze_text(width, height, style, seed)
    return parse_maze(text, maze_id or f"gen-{style}-{width}x{height}-s{seed}")


def _farthest_pair(width: int, height: int, floor: set[Cell]) -> tuple[Cell, Cell]:
    """Maximal-BFS-distance floor pair, lexicographic smallest on ties.

    Exact all-pairs search up to a few thousand cells; beyond that falls back
    to a double BFS sweep (exact on perfect mazes, near-exact on braided).
    """
    probe = MazeSpec(width=width, height=height, floor=frozenset(floor),
                     start_cell=min(floor))
    if len(floor) > 3000:
        d0 = distances_from(probe, min(floor))
        a = max(sorted(d0), key=lambda c: d0[c])
        d1 = distances_from(probe, a)
        b = max(sorted(d1), key=lambda c: d1[c])
        return (a, b) if a <= b else (b, a)
    best = (-1, min(floor), min(floor))
    for origin in sorted(floor):
        dist = distances_from(probe, origin)
        far = max(sorted(dist), key=lambda c: dist[c])
        if dist[far] > best[0]:
            best = (dist[far], origin, far)
    return best[1], best[2]


def passage_count(maze: MazeSpec) -> int:
    """Number of open passages between adjacent floor cells."""
    return sum(len(maze.passable_neighbors(c)) for c in maze.floor) // 2
