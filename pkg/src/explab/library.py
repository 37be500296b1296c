"""Hand-authored experiment layouts.

The layouts are desk-scale stand-ins with the topology the experiments need:
multiple branches (at least three decision points each), and a loop whose
arms differ in length so the direct route to the goal can be sealed while a
detour survives. exp1 hosts the free/goal/blocked session; exp2a and exp2b
are the two designs of the generalization pair.
"""

from __future__ import annotations

from .maze import MazeSpec, parse_maze

EXP1 = """\
#########
#S......#
#.#.#.#.#
#.#...#.#
#.#.###.#
#.#.#...#
#.#.#.#.#
#...#..G#
#########
"""

EXP2A = """\
#########
#S......#
#.###.#.#
#...#...#
#.#.#.#.#
#...#..G#
#########
"""

EXP2B = """\
#########
#S......#
#######.#
#G....#.#
#.###.#.#
#.#.....#
#.#.###.#
#.......#
#########
"""

_TEXTS = {"exp1": EXP1, "exp2a": EXP2A, "exp2b": EXP2B}

EXPERIMENT2_PAIR = ("exp2a", "exp2b")


def maze_ids() -> tuple[str, ...]:
    return tuple(sorted(_TEXTS))


def maze_text(maze_id: str) -> str:
    if maze_id not in _TEXTS:
        raise KeyError(f"unknown maze id {maze_id!r}; have {sorted(_TEXTS)}")
    return _TEXTS[maze_id]


def get_maze(maze_id: str) -> MazeSpec:
    return parse_maze(maze_text(maze_id), maze_id)
