"""Independent reference implementations used to derive expected test values.

Everything here is deliberately brute-force and stateless so it shares no
code path with the implementations it checks.
"""

from __future__ import annotations

import collections
import itertools

from explab.maze import Cell, MazeSpec

_DIRS = ((0, -1), (1, 0), (0, 1), (-1, 0))


def _edge(a: Cell, b: Cell):
    return (a, b) if a <= b else (b, a)


def _open_neighbors(maze: MazeSpec, c: Cell) -> list[Cell]:
    """Naive four-direction scan, re-deriving passability from raw fields."""
    out = []
    for dx, dy in _DIRS:
        n = (c[0] + dx, c[1] + dy)
        if c in maze.floor and n in maze.floor and _edge(c, n) not in maze.blocked_edges:
            out.append(n)
    return out


def flood_fill(maze: MazeSpec) -> set[Cell]:
    """Recursive flood fill from the start cell."""
    seen: set[Cell] = set()

    def visit(c: Cell) -> None:
        if c in seen:
            return
        seen.add(c)
        for n in _open_neighbors(maze, c):
            visit(n)

    visit(maze.start_cell)
    return seen


def naive_decision_points(maze: MazeSpec) -> set[Cell]:
    """Degree-counting definition: reachable cells with open-neighbor count != 2."""
    return {c for c in flood_fill(maze) if len(_open_neighbors(maze, c)) != 2}


def corridor_position_oracle(length: int, start_x: int, sub_steps: int,
                             moves: list[str]) -> tuple[int, int]:
    """1-D absolute sub-unit position model for an east-facing corridor.

    Cells are x = 1..length at a fixed row; returns (cell_x, sub_offset)
    after applying forward/back moves with clamping at the corridor ends.
    """
    pos = start_x * sub_steps
    lo, hi = 1 * sub_steps, length * sub_steps + (sub_steps - 1)
    for move in moves:
        nxt = pos + (1 if move == "forward" else -1)
        if lo <= nxt <= hi:
            pos = nxt
    return pos // sub_steps, pos % sub_steps


def permitted_next_cells(maze: MazeSpec, prefix: list[Cell]) -> set[Cell]:
    """All rule-permitted departures from the end of a trajectory prefix.

    Recomputed entirely from the prefix: no incremental state.
    """
    current = prefix[-1]
    visited = set(prefix)
    nbrs = _open_neighbors(maze, current)
    unvisited = [n for n in nbrs if n not in visited]
    if unvisited:
        return set(unvisited)
    # All neighbors visited: find the most recently first-visited cell that
    # still borders unexplored floor.
    first_seen: dict[Cell, int] = {}
    for i, c in enumerate(prefix):
        if c not in first_seen:
            first_seen[c] = i
    candidates = [c for c in visited
                  if any(n not in visited for n in _open_neighbors(maze, c))]
    if not candidates:
        return set(nbrs)
    branch = max(candidates, key=lambda c: first_seen[c])
    dist = {branch: 0}
    queue = collections.deque([branch])
    while queue:
        c = queue.popleft()
        for n in _open_neighbors(maze, c):
            if n in visited and n not in dist:
                dist[n] = dist[c] + 1
                queue.append(n)
    if current not in dist:
        return set()
    return {n for n in nbrs if n in dist and dist[n] == dist[current] - 1}


def consistency_fraction_oracle(maze: MazeSpec, cells: list[Cell]) -> tuple[list[bool], float]:
    """Stateless re-derivation of the per-decision consistency flags."""
    dpoints = naive_decision_points(maze)
    flags: list[bool] = []
    for i in range(len(cells) - 1):
        if cells[i] not in dpoints:
            continue
        permitted = permitted_next_cells(maze, cells[: i + 1])
        flags.append(cells[i + 1] in permitted)
    fraction = sum(flags) / len(flags) if flags else 1.0
    return flags, fraction


def exact_kmeans_1d(values: list[float], k: int) -> tuple[float, list[float]]:
    """Optimal 1-D k-means by enumerating contiguous partitions of the sorted
    values; returns (sse, ascending centroids)."""
    xs = sorted(values)
    n = len(xs)
    best_sse = float("inf")
    best_centroids: list[float] = []
    for cuts in itertools.combinations(range(1, n), k - 1):
        bounds = (0,) + cuts + (n,)
        sse = 0.0
        centroids = []
        for lo, hi in zip(bounds, bounds[1:]):
            chunk = xs[lo:hi]
            mean = sum(chunk) / len(chunk)
            sse += sum((v - mean) ** 2 for v in chunk)
            centroids.append(mean)
        if sse < best_sse:
            best_sse = sse
            best_centroids = centroids
    return best_sse, best_centroids


def exact_two_group_permutation_p(group_a: list[float], group_b: list[float]) -> float:
    """Two-sided exact permutation p-value over index subsets of the raw pool."""
    pool = list(group_a) + list(group_b)
    na = len(group_a)
    observed = abs(sum(group_a) / na - sum(group_b) / len(group_b))
    hits = 0
    total = 0
    for combo in itertools.combinations(range(len(pool)), na):
        chosen = [pool[i] for i in combo]
        rest = [pool[i] for i in range(len(pool)) if i not in combo]
        delta = abs(sum(chosen) / len(chosen) - sum(rest) / len(rest))
        total += 1
        if delta >= observed - 1e-12:
            hits += 1
    return hits / total
