import csv
import os

import pytest

from explab.cli import main
from explab.maze import MazeParseError, parse_maze
from explab.mazegen import passage_count
from explab.protocol import run_session, build_plan, write_session
from explab.agents import AgentConfig

RING = "#####\n#S..#\n#.#.#\n#..G#\n#####\n"


def run_cli(args):
    return main(args)


# --- run-agent -----------------------------------------------------------------

def test_run_agent_writes_three_phase_logs(tmp_path, capsys):
    out = str(tmp_path / "data")
    code = run_cli(["run-agent", "--kind", "dfs", "--experiment", "1",
                    "--maze", "exp1", "--seed", "3", "--out", out])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 4  # three phase lines plus the written-path note
    session_dir = os.path.join(out, "e1-standard-dfs-seed3")
    for label in ("A", "B", "C"):
        assert os.path.exists(os.path.join(session_dir, f"phase-{label}.jsonl"))


def test_run_agent_unknown_kind_exits_2_with_usage(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli(["run-agent", "--kind", "astar", "--out", str(tmp_path)])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_run_agent_metric_lines_are_deterministic(tmp_path, capsys):
    args = ["run-agent", "--kind", "random", "--experiment", "1", "--seed", "5",
            "--budget", "50"]
    run_cli(args + ["--out", str(tmp_path / "a")])
    first = capsys.readouterr().out.splitlines()[:3]
    run_cli(args + ["--out", str(tmp_path / "b")])
    second = capsys.readouterr().out.splitlines()[:3]
    assert first == second


def test_run_agent_respects_env_data_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("EXPLAB_DATA_DIR", str(tmp_path / "envdata"))
    code = run_cli(["run-agent", "--kind", "dfs", "--budget", "40"])
    assert code == 0
    assert os.path.isdir(tmp_path / "envdata" / "e1-standard-dfs-seed0")


def test_run_agent_bad_maze_is_runtime_error(tmp_path, capsys):
    code = run_cli(["run-agent", "--kind", "dfs", "--maze", "no-such-maze",
                    "--out", str(tmp_path)])
    assert code == 1
    assert "error" in capsys.readouterr().err


# --- batch ----------------------------------------------------------------------

def test_batch_runs_manifest(tmp_path, capsys):
    manifest = tmp_path / "m.txt"
    manifest.write_text("kind=dfs seed=1 experiment=1\n"
                        "kind=random seed=2 experiment=1 budget=40\n")
    out = str(tmp_path / "out")
    code = run_cli(["batch", str(manifest), "--out", out])
    assert code == 0
    assert len(os.listdir(out)) == 2
    assert "2/2 sessions written" in capsys.readouterr().out


def test_batch_reports_bad_rows_and_exits_nonzero(tmp_path, capsys):
    manifest = tmp_path / "m.txt"
    manifest.write_text("kind=dfs seed=1 experiment=1\n"
                        "kind=dfs seed=2 experiment=1 maze=missing\n")
    code = run_cli(["batch", str(manifest), "--out", str(tmp_path / "out")])
    assert code == 1
    out = capsys.readouterr().out
    assert "row=1 error" in out


# --- analyze --------------------------------------------------------------------

def _write_sessions(out_dir, n=4):
    for seed in range(n):
        plan = build_plan(1, None, ("exp1",), 80)
        session = run_session(AgentConfig(kind="random", seed=seed), plan,
                              f"s{seed:02d}")
        write_session(session, out_dir)


def test_analyze_writes_both_csvs_with_fixed_columns(tmp_path, capsys):
    logdir = str(tmp_path / "logs")
    os.makedirs(logdir)
    _write_sessions(logdir, n=4)
    out = str(tmp_path / "report")
    code = run_cli(["analyze", logdir, "--out", out])
    assert code == 0
    with open(os.path.join(out, "sessions.csv")) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0].keys()) == [
        "session_id", "agent_kind_or_human", "condition", "phase", "coverage",
        "steps_to_goal", "dnf", "consistency_fraction", "decision_count",
        "re_exploration", "cells_crossed", "duration_ms"]
    assert len(rows) == 12
    with open(os.path.join(out, "cohort.csv")) as fh:
        cohort = list(csv.DictReader(fh))
    stats = {r["statistic"] for r in cohort}
    assert "cluster_centroid" in stats
    assert "consistency_mean_of_fractions" in stats
    assert "consistency_permutation_p" in stats


def test_analyze_single_session_reports_insufficient_data(tmp_path):
    logdir = str(tmp_path / "logs")
    os.makedirs(logdir)
    _write_sessions(logdir, n=1)
    out = str(tmp_path / "report")
    assert run_cli(["analyze", logdir, "--out", out]) == 0
    with open(os.path.join(out, "cohort.csv")) as fh:
        cohort = list(csv.DictReader(fh))
    cluster_rows = [r for r in cohort if r["statistic"] == "cluster_centroid"]
    assert len(cluster_rows) == 1
    assert cluster_rows[0]["note"] == "insufficient data"


def test_analyze_mixed_human_and_agent_sessions(tmp_path):
    logdir = str(tmp_path / "logs")
    os.makedirs(logdir)
    _write_sessions(logdir, n=2)
    plan = build_plan(1, None, ("exp1",), 60)
    human = run_session(AgentConfig(kind="dfs", seed=9), plan, "kid-p01")
    human.subject = {"type": "human", "tag": "p01"}
    write_session(human, logdir)
    out = str(tmp_path / "report")
    assert run_cli(["analyze", logdir, "--out", out]) == 0
    with open(os.path.join(out, "sessions.csv")) as fh:
        rows = list(csv.DictReader(fh))
    subjects = {r["agent_kind_or_human"] for r in rows}
    assert "human" in subjects and "random" in subjects


def test_analyze_empty_dir_is_an_error(tmp_path, capsys):
    logdir = str(tmp_path / "empty")
    os.makedirs(logdir)
    assert run_cli(["analyze", logdir, "--out", str(tmp_path / "r")]) == 1
    assert "no session directories" in capsys.readouterr().err


def test_analyze_skips_malformed_session_but_continues(tmp_path, capsys):
    logdir = str(tmp_path / "logs")
    os.makedirs(logdir)
    _write_sessions(logdir, n=2)
    bad = os.path.join(logdir, "broken")
    os.makedirs(bad)
    with open(os.path.join(bad, "meta"), "w") as fh:
        fh.write("{not json")
    out = str(tmp_path / "report")
    assert run_cli(["analyze", logdir, "--out", out]) == 0
    assert "skipping" in capsys.readouterr().err
    with open(os.path.join(out, "cohort.csv")) as fh:
        cohort = list(csv.DictReader(fh))
    errors = [r for r in cohort if r["statistic"] == "load_error"]
    assert len(errors) == 1 and errors[0]["group"] == "broken"


GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "data", "golden")
GOLDEN_MANIFEST = os.path.join(os.path.dirname(__file__), "data",
                               "golden_manifest.txt")


def test_analyze_golden_files(tmp_path, capsys):
    # The checked-in corpus regenerates deterministically; the report bytes
    # must match the frozen CSVs exactly.
    sessions_dir = str(tmp_path / "sessions")
    out = str(tmp_path / "report")
    assert run_cli(["batch", GOLDEN_MANIFEST, "--out", sessions_dir]) == 0
    assert run_cli(["analyze", sessions_dir, "--out", out]) == 0
    capsys.readouterr()
    for name in ("sessions.csv", "cohort.csv"):
        with open(os.path.join(out, name), "rb") as fh:
            produced = fh.read()
        with open(os.path.join(GOLDEN_DIR, name), "rb") as fh:
            frozen = fh.read()
        assert produced == frozen, f"{name} drifted from the golden copy"


# --- validate-maze ----------------------------------------------------------------

def test_validate_maze_accepts_what_parse_accepts(tmp_path, capsys):
    cases = [
        (RING, True),
        (RING.replace("G", "S"), False),          # two starts
        ("#####\n#S.#\n#####\n", False),           # ragged
        ("#######\n#S.#.G#\n#######\n", False),    # unreachable goal
        ("#####\n#S.a#\n#.#.#\n#.BG#\n#####\n", True),
    ]
    for i, (text, ok) in enumerate(cases):
        path = tmp_path / f"m{i}.txt"
        path.write_text(text)
        code = run_cli(["validate-maze", str(path)])
        capsys.readouterr()
        parses = True
        try:
            parse_maze(text)
        except Exception:
            parses = False
        assert parses == ok
        assert (code == 0) == ok


def test_validate_maze_prints_stats(tmp_path, capsys):
    path = tmp_path / "ring.txt"
    path.write_text(RING)
    assert run_cli(["validate-maze", str(path)]) == 0
    out = capsys.readouterr().out
    assert "5x5" in out and "8 floor" in out and "goal=yes" in out


# --- gen-maze ----------------------------------------------------------------------

def test_gen_maze_perfect_is_spanning_tree(capsys):
    assert run_cli(["gen-maze", "--width", "9", "--height", "9",
                    "--style", "perfect", "--seed", "1"]) == 0
    maze = parse_maze(capsys.readouterr().out)
    assert passage_count(maze) == len(maze.floor) - 1


def test_gen_maze_braided_has_extra_passages(capsys):
    assert run_cli(["gen-maze", "--width", "9", "--height", "9",
                    "--style", "braided", "--seed", "1"]) == 0
    maze = parse_maze(capsys.readouterr().out)
    assert passage_count(maze) > len(maze.floor) - 1


def test_gen_maze_same_seed_same_text(capsys):
    run_cli(["gen-maze", "--width", "11", "--height", "9", "--seed", "4"])
    first = capsys.readouterr().out
    run_cli(["gen-maze", "--width", "11", "--height", "9", "--seed", "4"])
    assert capsys.readouterr().out == first


def test_gen_maze_rejects_even_dimensions(capsys):
    assert run_cli(["gen-maze", "--width", "8", "--height", "9"]) == 1
    assert "odd" in capsys.readouterr().err
