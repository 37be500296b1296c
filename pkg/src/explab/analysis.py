"""Trajectory metrics: discretization, coverage, search-consistency, clustering.

All metrics operate on cell trajectories (ordered cell visits with
consecutive duplicates collapsed), the common currency for humans and agents.
The headline metric scores how consistent a trajectory is with depth-first
search, evaluated only at decision points: cells whose passable-neighbor
count is not 2, i.e. dead-ends, junctions and isolated cells. A departure
from a decision point counts as consistent when it either

  1. enters a cell not visited before, or
  2. has no unvisited neighbor available and moves along a shortest path
     (within the already-visited cells) toward the most recently discovered
     cell that still has an unvisited passable neighbor; with nothing left
     to discover, any move counts.
"""

from __future__ import annotations

import collections
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .maze import Cell, MazeSpec, reachable_cells
from .logs import TrajectoryLog


class AnalysisError(ValueError):
    """Raised for invalid trajectories or malformed metric inputs."""


@dataclass(frozen=True)
class CellTrajectory:
    """Deduplicated cell visit sequence for one session phase."""

    cells: tuple[Cell, ...]
    maze_id: str = ""


@dataclass(frozen=True)
class Decision:
    """One evaluated departure from a decision point."""

    index: int
    cell: Cell
    chosen_next: Cell
    consistent: bool
    rule_applied: int | None  # 1, 2, or None when the move broke both rules


@dataclass(frozen=True)
class ConsistencyResult:
    decisions: tuple[Decision, ...]
    fraction: float


def validate_trajectory(traj: CellTrajectory, maze: MazeSpec) -> None:
    for i, c in enumerate(traj.cells):
        if c not in maze.floor:
            raise AnalysisError(f"trajectory cell {c} at index {i} is not floor")
    for i, (a, b) in enumerate(zip(traj.cells, traj.cells[1:])):
        if a == b:
            raise AnalysisError(f"consecutive duplicate cell {a} at index {i}")
        if not maze.passable(a, b):
            raise AnalysisError(f"impassable move {a} -> {b} at index {i}")


def discretize(log: TrajectoryLog, maze: MazeSpec) -> CellTrajectory:
    """Map each logged pose to its cell and collapse consecutive duplicates."""
    cells: list[Cell] = []
    for i, rec in enumerate(log.records):
        cell = (rec.cell_x, rec.cell_y)
        if cell not in maze.floor:
            raise AnalysisError(f"record {i} pose {cell} is not on the floor")
        if not cells or cells[-1] != cell:
            cells.append(cell)
    return CellTrajectory(cells=tuple(cells), maze_id=maze.id)


def coverage(traj: CellTrajectory, maze: MazeSpec) -> float:
    """Fraction of the reachable maze visited: distinct cells / reachable cells."""
    if not traj.cells:
        return 0.0
    return len(set(traj.cells)) / len(reachable_cells(maze))


def decision_points(maze: MazeSpec) -> frozenset[Cell]:
    """Reachable cells whose passable-neighbor count is not 2."""
    return frozenset(c for c in reachable_cells(maze)
                     if len(maze.passable_neighbors(c)) != 2)


def dfs_consistency(traj: CellTrajectory, maze: MazeSpec) -> ConsistencyResult:
    """Score every decision-point departure against the two DFS rules.

    A trajectory with no evaluated decisions scores 1.0 (vacuously
    consistent) so cohort averages stay total.
    """
    validate_trajectory(traj, maze)
    dpoints = decision_points(maze)
    cells = traj.cells

    visited: set[Cell] = set()
    first_order: list[Cell] = []  # cells in first-visit order, for branch recency
    decisions: list[Decision] = []
    for i, cell in enumerate(cells):
        if cell not in visited:
            visited.add(cell)
            first_order.append(cell)
        if i == len(cells) - 1:
            break
        if cell not in dpoints:
            continue
        nxt = cells[i + 1]
        if nxt not in visited:
            decisions.append(Decision(i, cell, nxt, True, 1))
            continue
        neighbors = maze.passable_neighbors(cell)
        if any(n not in visited for n in neighbors):
            # An unvisited neighbor was available but a visited cell was chosen.
            decisions.append(Decision(i, cell, nxt, False, None))
            continue
        branch = _most_recent_branch(maze, visited, first_order)
        if branch is None:
            decisions.append(Decision(i, cell, nxt, True, 2))
            continue
        dist = _visited_subgraph_distances(maze, visited, branch)
        ok = nxt in dist and cell in dist and dist[nxt] == dist[cell] - 1
        decisions.append(Decision(i, cell, nxt, ok, 2 if ok else None))

    if decisions:
        fraction = sum(d.consistent for d in decisions) / len(decisions)
    else:
        fraction = 1.0
    return ConsistencyResult(decisions=tuple(decisions), fraction=fraction)


def _most_recent_branch(maze: MazeSpec, visited: set[Cell],
                        first_order: list[Cell]) -> Cell | None:
    for cell in reversed(first_order):
        if any(n not in visited for n in maze.passable_neighbors(cell)):
            return cell
    return None


def _visited_subgraph_distances(maze: MazeSpec, visited: set[Cell],
                                origin: Cell) -> dict[Cell, int]:
    dist = {origin: 0}
    queue = collections.deque([origin])
    while queue:
        c = queue.popleft()
        for n in maze.passable_neighbors(c):
            if n in visited and n not in dist:
                dist[n] = dist[c] + 1
                queue.append(n)
    return dist


DNF = None  # steps_to_goal sentinel: the goal was never entered


def steps_to_goal(traj: CellTrajectory, maze: MazeSpec) -> int | None:
    """Cell transitions before the first goal entry; None when never entered."""
    if maze.goal is None:
        raise AnalysisError("maze has no goal")
    for i, cell in enumerate(traj.cells):
        if cell == maze.goal:
            return i
    return DNF


def re_exploration(traj: CellTrajectory) -> float:
    """Fraction of distinct visited cells that were entered more than once."""
    if not traj.cells:
        return 0.0
    counts = collections.Counter(traj.cells)
    return sum(1 for v in counts.values() if v > 1) / len(counts)


def cells_crossed(traj: CellTrajectory) -> int:
    return max(0, len(traj.cells) - 1)


# --- explorer clustering ---------------------------------------------------

CLUSTER_NAMES_3 = ("low", "medium", "high")


@dataclass(frozen=True)
class ClusterResult:
    labels: tuple[str, ...]      # one label per input value
    centroids: tuple[float, ...]  # ascending
    names: tuple[str, ...]        # cluster names, ascending centroid order


def cluster_explorers(values: list[float], k: int = 3, seed: int = 0,
                      n_init: int = 10, max_iter: int = 200) -> ClusterResult:
    """1-D k-means over coverage fractions, seeded k-means++ initialization.

    Runs n_init restarts and keeps the lowest-inertia solution; clusters are
    named by ascending centroid (low/medium/high for the default k=3).
    """
    if k < 1:
        raise AnalysisError("k must be at least 1")
    if len(values) < k:
        raise AnalysisError(f"need at least k={k} values, got {len(values)}")
    x = np.asarray(values, dtype=float)
    rng = np.random.default_rng(seed)

    best_centroids: np.ndarray | None = None
    best_inertia = math.inf
    for _ in range(n_init):
        centroids = _kmeanspp_init(x, k, rng)
        centroids, inertia = _lloyd(x, centroids, max_iter)
        if inertia < best_inertia:
            best_inertia = inertia
            best_centroids = centroids
    assert best_centroids is not None
    centroids = np.sort(best_centroids)
    names = CLUSTER_NAMES_3 if k == 3 else tuple(f"c{i}" for i in range(k))
    assign = np.argmin(np.abs(x[:, None] - centroids[None, :]), axis=1)
    labels = tuple(names[j] for j in assign)
    return ClusterResult(labels=labels, centroids=tuple(float(c) for c in centroids),
                         names=tuple(names))


def _kmeanspp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centroids = [x[rng.integers(len(x))]]
    while len(centroids) < k:
        d2 = np.min((x[:, None] - np.asarray(centroids)[None, :]) ** 2, axis=1)
        total = d2.sum()
        if total == 0:
            centroids.append(x[rng.integers(len(x))])
            continue
        centroids.append(x[rng.choice(len(x), p=d2 / total)])
    return np.asarray(centroids, dtype=float)


def _lloyd(x: np.ndarray, centroids: np.ndarray, max_iter: int) -> tuple[np.ndarray, float]:
    k = len(centroids)
    for _ in range(max_iter):
        assign = np.argmin(np.abs(x[:, None] - centroids[None, :]), axis=1)
        new = centroids.copy()
        for j in range(k):
            members = x[assign == j]
            if len(members):
                new[j] = members.mean()
            else:
                # Re-seed an empty cluster at the point farthest from its centroid.
                new[j] = x[np.argmax(np.min(np.abs(x[:, None] - centroids[None, :]) ** 2, axis=1))]
        if np.array_equal(new, centroids):
            break
        centroids = new
    assign = np.argmin(np.abs(x[:, None] - centroids[None, :]), axis=1)
    inertia = float(((x - centroids[assign]) ** 2).sum())
    return centroids, inertia


# --- significance testing ---------------------------------------------------

EXACT_ENUMERATION_LIMIT = 100_000


def permutation_test(group_a: list[float], group_b: list[float],
                     iterations: int = 10_000, seed: int = 0) -> float:
    """Two-sided permutation p-value for the difference in group means.

    Enumerates every label assignment when there are at most 100,000 of
    them, otherwise estimates by Monte Carlo with the given iteration count
    (add-one corrected, so the identity labelling is always included).
    Inputs are canonicalized so swapping the two groups is an exact no-op.
    """
    if not group_a or not group_b:
        raise AnalysisError("permutation test needs two non-empty groups")
    observed = abs(_mean(group_a) - _mean(group_b))
    pool = sorted(list(group_a) + list(group_b))
    n = len(pool)
    k = min(len(group_a), len(group_b))
    total = math.comb(n, k)
    pool_sum = sum(pool)

    if total <= EXACT_ENUMERATION_LIMIT:
        hits = 0
        for combo in itertools.combinations(range(n), k):
            small = sum(pool[i] for i in combo)
            delta = abs(small / k - (pool_sum - small) / (n - k))
            if delta >= observed - 1e-12:
                hits += 1
        return hits / total

    rng = np.random.default_rng(seed)
    arr = np.asarray(pool, dtype=float)
    hits = 0
    for _ in range(iterations):
        perm = rng.permutation(arr)
        delta = abs(perm[:k].mean() - perm[k:].mean())
        if delta >= observed - 1e-12:
            hits += 1
    return (hits + 1) / (iterations + 1)


def welch_t(group_a: list[float], group_b: list[float]) -> float:
    """Welch's t statistic for unequal-variance group means."""
    if len(group_a) < 2 or len(group_b) < 2:
        raise AnalysisError("Welch's t needs at least two values per group")
    ma, mb = _mean(group_a), _mean(group_b)
    va = sum((v - ma) ** 2 for v in group_a) / (len(group_a) - 1)
    vb = sum((v - mb) ** 2 for v in group_b) / (len(group_b) - 1)
    denom = math.sqrt(va / len(group_a) + vb / len(group_b))
    if denom == 0:
        return 0.0
    return (ma - mb) / denom


def _mean(values: list[float]) -> float:
    return sum(values) / len(values)
