"""explab: a desk-scale maze exploration laboratory.

A discrete first-person-style maze simulator, a zoo of exploration agents,
two experiment protocols (free/goal/blocked exploration and dense-versus-
sparse local rewards over a two-maze generalization pair), a live HTTP
session service through which humans produce the exact same trajectory logs
as agents, and an analysis suite computing coverage, steps-to-goal,
depth-first-search consistency, re-exploration, explorer clustering and
permutation significance over those logs.
"""

__version__ = "0.1.0"

from .maze import (AvatarState, MazeSpec, Observation, apply_blocked_variant,
                   observe, parse_maze, reachable_cells, render_maze, step)
from .agents import Agent, AgentConfig
from .analysis import (CellTrajectory, ConsistencyResult, cluster_explorers,
                       coverage, decision_points, dfs_consistency, discretize,
                       permutation_test, re_exploration, steps_to_goal)
from .protocol import (ExperimentPlan, SessionLog, build_plan, run_session,
                       read_session, write_session)

__all__ = [
    "AvatarState", "MazeSpec", "Observation", "apply_blocked_variant",
    "observe", "parse_maze", "reachable_cells", "render_maze", "step",
    "Agent", "AgentConfig",
    "CellTrajectory", "ConsistencyResult", "cluster_explorers", "coverage",
    "decision_points", "dfs_consistency", "discretize", "permutation_test",
    "re_exploration", "steps_to_goal",
    "ExperimentPlan", "SessionLog", "build_plan", "run_session",
    "read_session", "write_session",
    "__version__",
]
