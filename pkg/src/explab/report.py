"""Report assembly: per-phase metric rows and cohort statistics as CSV.

The per-session CSV has one row per (session, phase) with the metric set the
experiments measure: percent of maze explored, steps to goal (with DNFs kept
out of averages and reported as a flag), search consistency at decision
points, cells crossed, re-exploration, and wall-clock duration.

The cohort CSV is long-format (one statistic per row). It carries the
explorer clusters over free-exploration coverage, the consistency comparison
between the free and goal phases (both per-trajectory means and pooled
decision counts, plus a permutation p-value and Welch's t), and the
dense-versus-sparse comparisons for the two-maze experiment.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .analysis import (cells_crossed, cluster_explorers, coverage, dfs_consistency,
                       discretize, permutation_test, re_exploration, steps_to_goal,
                       welch_t)
from .protocol import SessionLog

SESSION_COLUMNS = ["session_id", "agent_kind_or_human", "condition", "phase",
                   "coverage", "steps_to_goal", "dnf", "consistency_fraction",
                   "decision_count", "re_exploration", "cells_crossed", "duration_ms"]

COHORT_COLUMNS = ["statistic", "experiment", "condition", "phase", "group",
                  "value", "n", "note"]

INSUFFICIENT = "insufficient data"


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


@dataclass
class PhaseMetrics:
    session_id: str
    subject: str
    condition: str
    experiment: int
    phase_label: str
    maze_index: int
    phase_in_maze: int
    goal_active: bool
    coverage: float
    steps_to_goal: int | None
    consistency_fraction: float
    decision_count: int
    re_exploration: float
    cells_crossed: int
    duration_ms: int

    @property
    def dnf(self) -> bool | None:
        if not self.goal_active:
            return None
        return self.steps_to_goal is None

    def csv_row(self) -> dict:
        return {
            "session_id": self.session_id,
            "agent_kind_or_human": self.subject,
            "condition": self.condition,
            "phase": self.phase_label,
            "coverage": fmt(self.coverage),
            "steps_to_goal": fmt(self.steps_to_goal),
            "dnf": fmt(self.dnf),
            "consistency_fraction": fmt(self.consistency_fraction),
            "decision_count": fmt(self.decision_count),
            "re_exploration": fmt(self.re_exploration),
            "cells_crossed": fmt(self.cells_crossed),
            "duration_ms": fmt(self.duration_ms),
        }


def session_metrics(session: SessionLog) -> list[PhaseMetrics]:
    out = []
    for result in session.phases:
        maze = result.plan.maze
        traj = discretize(result.log, maze)
        consistency = dfs_consistency(traj, maze)
        steps = steps_to_goal(traj, maze) if result.plan.goal_active else None
        out.append(PhaseMetrics(
            session_id=session.session_id,
            subject=session.subject_name,
            condition=session.plan.condition,
            experiment=session.plan.experiment,
            phase_label=result.plan.label,
            maze_index=result.plan.maze_index,
            phase_in_maze=result.plan.phase_in_maze,
            goal_active=result.plan.goal_active,
            coverage=coverage(traj, maze),
            steps_to_goal=steps,
            consistency_fraction=consistency.fraction,
            decision_count=len(consistency.decisions),
            re_exploration=re_exploration(traj),
            cells_crossed=cells_crossed(traj),
            duration_ms=result.duration_ms,
        ))
    return out


def _median(values: list[float]) -> float | None:
    if not values:
        return None
    ordered = sorted(values)
    mid = len(ordered) // 2
    if len(ordered) % 2:
        return float(ordered[mid])
    return (ordered[mid - 1] + ordered[mid]) / 2


def cohort_row(statistic, experiment="", condition="", phase="", group="",
         value=None, n=None, note="") -> dict:
    return {"statistic": statistic, "experiment": fmt(experiment),
            "condition": fmt(condition), "phase": fmt(phase), "group": fmt(group),
            "value": fmt(value), "n": fmt(n), "note": note}


def cohort_rows(metrics: list[PhaseMetrics], cluster_seed: int = 0,
                permutation_iterations: int = 10_000) -> list[dict]:
    rows: list[dict] = []
    rows.extend(_experiment1_rows(
        [m for m in metrics if m.experiment == 1], cluster_seed,
        permutation_iterations))
    rows.extend(_experiment2_rows(
        [m for m in metrics if m.experiment == 2], permutation_iterations))
    return rows


def _experiment1_rows(metrics: list[PhaseMetrics], cluster_seed: int,
                      iterations: int) -> list[dict]:
    rows: list[dict] = []
    if not metrics:
        return rows
    by_phase: dict[str, list[PhaseMetrics]] = {}
    for m in metrics:
        by_phase.setdefault(m.phase_label, []).append(m)

    # Explorer clusters over free-exploration coverage.
    free = sorted(by_phase.get("A", []), key=lambda m: m.session_id)
    coverages = [m.coverage for m in free]
    if len(coverages) >= 3:
        clusters = cluster_explorers(coverages, k=3, seed=cluster_seed)
        for name, centroid in zip(clusters.names, clusters.centroids):
            size = sum(1 for label in clusters.labels if label == name)
            rows.append(cohort_row("cluster_centroid", 1, "standard", "A", name,
                             centroid, size))
        # Mean goal-phase steps per explorer type, DNFs excluded.
        steps_by_session = {m.session_id: m.steps_to_goal for m in by_phase.get("B", [])}
        for name in clusters.names:
            member_steps = [steps_by_session[m.session_id]
                            for m, label in zip(free, clusters.labels)
                            if label == name and steps_by_session.get(m.session_id) is not None]
            rows.append(cohort_row("mean_steps_to_goal_by_cluster", 1, "standard", "B",
                             name, _mean_or_none(member_steps), len(member_steps),
                             "" if member_steps else INSUFFICIENT))
    else:
        rows.append(cohort_row("cluster_centroid", 1, "standard", "A", "",
                         None, len(coverages), INSUFFICIENT))

    # Per-phase metric medians plus the consistency comparison (both the
    # mean-of-fractions and pooled-decision aggregations).
    for label in ("A", "B", "C"):
        group = by_phase.get(label, [])
        if not group:
            continue
        rows.extend(_phase_median_rows(group, 1, "standard", label))
        fractions = [m.consistency_fraction for m in group]
        rows.append(cohort_row("consistency_mean_of_fractions", 1, "standard", label, "",
                         sum(fractions) / len(fractions), len(fractions)))
        total_decisions = sum(m.decision_count for m in group)
        consistent = sum(m.consistency_fraction * m.decision_count for m in group)
        rows.append(cohort_row("consistency_pooled_decisions", 1, "standard", label, "",
                         consistent / total_decisions if total_decisions else 1.0,
                         total_decisions))
    free_fracs = [m.consistency_fraction for m in by_phase.get("A", [])]
    goal_fracs = [m.consistency_fraction for m in by_phase.get("B", [])]
    if free_fracs and goal_fracs:
        p = permutation_test(free_fracs, goal_fracs, iterations=iterations, seed=0)
        rows.append(cohort_row("consistency_permutation_p", 1, "standard", "A_vs_B", "",
                         p, len(free_fracs) + len(goal_fracs)))
        if len(free_fracs) >= 2 and len(goal_fracs) >= 2:
            rows.append(cohort_row("consistency_welch_t", 1, "standard", "A_vs_B", "",
                             welch_t(free_fracs, goal_fracs),
                             len(free_fracs) + len(goal_fracs)))
    return rows


def _mean_or_none(values: list) -> float | None:
    if not values:
        return None
    return sum(values) / len(values)


def _phase_median_rows(group: list[PhaseMetrics], experiment: int, condition: str,
                       phase: str) -> list[dict]:
    """The protocol's metric set over one (condition, phase) cohort slice:
    percent explored, steps to goal (DNFs as a separate rate), cells crossed,
    time, and percent re-explored."""
    n = len(group)
    rows = [
        cohort_row("median_coverage", experiment, condition, phase, "",
                   _median([m.coverage for m in group]), n),
        cohort_row("median_cells_crossed", experiment, condition, phase, "",
                   _median([m.cells_crossed for m in group]), n),
        cohort_row("median_duration_ms", experiment, condition, phase, "",
                   _median([m.duration_ms for m in group]), n),
        cohort_row("median_re_exploration", experiment, condition, phase, "",
                   _median([m.re_exploration for m in group]), n),
    ]
    goal_group = [m for m in group if m.goal_active]
    if goal_group:
        finished = [m.steps_to_goal for m in goal_group if m.steps_to_goal is not None]
        rows.append(cohort_row("median_steps_to_goal", experiment, condition, phase, "",
                               _median(finished), len(finished),
                               "" if finished else INSUFFICIENT))
        rows.append(cohort_row("dnf_rate", experiment, condition, phase, "",
                               sum(1 for m in goal_group if m.dnf) / len(goal_group),
                               len(goal_group)))
    return rows


def _experiment2_rows(metrics: list[PhaseMetrics], iterations: int) -> list[dict]:
    rows: list[dict] = []
    if not metrics:
        return rows
    conditions = sorted({m.condition for m in metrics})
    for condition in conditions:
        for phase_in_maze in (1, 2, 3):
            group = [m for m in metrics
                     if m.condition == condition and m.phase_in_maze == phase_in_maze]
            if not group:
                continue
            rows.extend(_phase_median_rows(group, 2, condition, str(phase_in_maze)))
    # Dense-versus-sparse significance on goal-seeking phases.
    if {"dense", "sparse"} <= set(conditions):
        for phase_in_maze in (2, 3):
            dense = [m.steps_to_goal for m in metrics
                     if m.condition == "dense" and m.phase_in_maze == phase_in_maze
                     and m.steps_to_goal is not None]
            sparse = [m.steps_to_goal for m in metrics
                      if m.condition == "sparse" and m.phase_in_maze == phase_in_maze
                      and m.steps_to_goal is not None]
            if dense and sparse:
                p = permutation_test(dense, sparse, iterations=iterations, seed=0)
                rows.append(cohort_row("steps_permutation_p", 2, "dense_vs_sparse",
                                 str(phase_in_maze), "", p, len(dense) + len(sparse)))
    return rows


def write_session_csv(path: str, metrics: list[PhaseMetrics]) -> None:
    _write_csv(path, SESSION_COLUMNS, [m.csv_row() for m in metrics])


def write_cohort_csv(path: str, rows: list[dict]) -> None:
    _write_csv(path, COHORT_COLUMNS, rows)


def _write_csv(path: str, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
