"""Command-line entry point: run agents, serve live sessions, analyze logs.

Commands
--------
run-agent      run one agent session through an experiment and write its logs
batch          run a manifest of sessions (parallelizable) into a data dir
serve          start the live session HTTP service for human play
analyze        turn a directory of session logs into the two report CSVs
validate-maze  parse and validate an ASCII maze file
gen-maze       generate a seeded perfect or braided maze

The data directory defaults to $EXPLAB_DATA_DIR, then ./explab-data.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import library, report
from .agents import AGENT_KINDS, AgentConfig
from .maze import MazeError, parse_maze, reachable_cells
from .mazegen import STYLES, generate_maze_text
from .analysis import decision_points
from .protocol import (BatchRow, ProtocolError, batch_run, build_plan,
                       list_session_dirs, parse_manifest, read_session,
                       run_session, write_session)

DEFAULT_DATA_DIR = "./explab-data"


def data_dir_default() -> str:
    return os.environ.get("EXPLAB_DATA_DIR", DEFAULT_DATA_DIR)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="explab",
                                     description="maze exploration laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run-agent", help="run one agent session")
    run.add_argument("--kind", required=True, choices=AGENT_KINDS)
    run.add_argument("--experiment", type=int, choices=(1, 2), default=1)
    run.add_argument("--condition", choices=("dense", "sparse"), default=None,
                     help="experiment 2 reward condition")
    run.add_argument("--maze", default=None,
                     help="maze id or file for experiment 1")
    run.add_argument("--mazes", default=None,
                     help="comma-separated maze pair for experiment 2")
    run.add_argument("--budget", type=int, default=None,
                     help="cell-transition budget per phase")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--epsilon", type=float, default=0.1)
    run.add_argument("--alpha", type=float, default=0.5)
    run.add_argument("--gamma", type=float, default=0.9)
    run.add_argument("--beta", type=float, default=1.0)
    run.add_argument("--optimistic-init", type=float, default=0.0)
    run.add_argument("--session-id", default=None)
    run.add_argument("--out", default=None, help="session output directory")

    batch = sub.add_parser("batch", help="run a manifest of sessions")
    batch.add_argument("manifest", help="line-oriented key=value manifest file")
    batch.add_argument("--out", default=None)
    batch.add_argument("--workers", type=int, default=1)

    serve = sub.add_parser("serve", help="start the live session service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8600)
    serve.add_argument("--data-dir", default=None)
    serve.add_argument("--static-dir", default=None,
                       help="also serve this directory at / (the web client)")

    analyze = sub.add_parser("analyze", help="build report CSVs from session logs")
    analyze.add_argument("logdir", help="directory of session directories")
    analyze.add_argument("--out", default=None, help="report output directory")
    analyze.add_argument("--cluster-seed", type=int, default=0)
    analyze.add_argument("--iterations", type=int, default=10_000,
                         help="Monte Carlo permutation iterations")

    val = sub.add_parser("validate-maze", help="parse and validate a maze file")
    val.add_argument("path")

    gen = sub.add_parser("gen-maze", help="generate a seeded maze")
    gen.add_argument("--width", type=int, required=True)
    gen.add_argument("--height", type=int, required=True)
    gen.add_argument("--style", choices=STYLES, default="perfect")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None, help="write to a file instead of stdout")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run-agent":
            return cmd_run_agent(args)
        if args.command == "batch":
            return cmd_batch(args)
        if args.command == "serve":
            return cmd_serve(args)
        if args.command == "analyze":
            return cmd_analyze(args)
        if args.command == "validate-maze":
            return cmd_validate_maze(args)
        return cmd_gen_maze(args)
    except (MazeError, ProtocolError, ValueError, KeyError, OSError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 1


def _maze_refs(args) -> tuple[str, ...] | None:
    if args.experiment == 1:
        return (args.maze,) if args.maze else None
    if args.mazes:
        return tuple(args.mazes.split(","))
    return None


def cmd_run_agent(args) -> int:
    config = AgentConfig(kind=args.kind, seed=args.seed, epsilon=args.epsilon,
                         alpha=args.alpha, gamma=args.gamma, beta=args.beta,
                         optimistic_init=args.optimistic_init)
    plan = build_plan(args.experiment, args.condition, _maze_refs(args), args.budget)
    session_id = args.session_id or \
        f"e{args.experiment}-{plan.condition}-{config.kind}-seed{config.seed}"
    session = run_session(config, plan, session_id)
    out = args.out or data_dir_default()
    path = write_session(session, out)
    for result, metrics in zip(session.phases, report.session_metrics(session)):
        print(_phase_line(metrics, result))
    print(f"session written to {path}")
    return 0


def _phase_line(m: report.PhaseMetrics, result) -> str:
    def dash(v):
        text = report.fmt(v)
        return text if text != "" else "-"

    fields = [("phase", m.phase_label), ("kind", result.plan.kind),
              ("outcome", result.outcome), ("transitions", result.transitions),
              ("coverage", m.coverage), ("steps_to_goal", m.steps_to_goal),
              ("dnf", m.dnf), ("consistency", m.consistency_fraction),
              ("re_exploration", m.re_exploration), ("cells_crossed", m.cells_crossed),
              ("duration_ms", m.duration_ms)]
    return " ".join(f"{key}={dash(value)}" for key, value in fields)


def cmd_batch(args) -> int:
    with open(args.manifest) as fh:
        rows = parse_manifest(fh.read())
    if not rows:
        print("error: empty manifest", file=sys.stderr)
        return 1
    out = args.out or data_dir_default()
    results = batch_run(rows, out, workers=args.workers)
    failures = 0
    for result in results:
        if result.error is None:
            print(f"row={result.index} session={result.session_id} ok")
        else:
            failures += 1
            print(f"row={result.index} error {result.error}")
    print(f"{len(results) - failures}/{len(results)} sessions written to {out}")
    return 0 if failures == 0 else 1


def cmd_serve(args) -> int:
    from .service import serve_forever
    data_dir = args.data_dir or data_dir_default()
    serve_forever(args.host, args.port, data_dir, static_dir=args.static_dir)
    return 0


def cmd_analyze(args) -> int:
    dirs = list_session_dirs(args.logdir)
    if not dirs:
        print(f"error: no session directories under {args.logdir}", file=sys.stderr)
        return 1
    metrics: list[report.PhaseMetrics] = []
    error_rows = []
    for path in dirs:
        try:
            session = read_session(path)
            metrics.extend(report.session_metrics(session))
        except Exception as exc:  # keep going; report the broken directory
            print(f"warning: skipping {path}: {exc}", file=sys.stderr)
            error_rows.append(report.cohort_row("load_error", group=os.path.basename(path),
                                          note=f"{type(exc).__name__}: {exc}"))
    out = args.out or data_dir_default()
    os.makedirs(out, exist_ok=True)
    sessions_csv = os.path.join(out, "sessions.csv")
    cohort_csv = os.path.join(out, "cohort.csv")
    report.write_session_csv(sessions_csv, metrics)
    cohort = report.cohort_rows(metrics, cluster_seed=args.cluster_seed,
                                permutation_iterations=args.iterations) + error_rows
    report.write_cohort_csv(cohort_csv, cohort)
    print(f"wrote {len(metrics)} phase rows to {sessions_csv}")
    print(f"wrote {len(cohort)} cohort rows to {cohort_csv}")
    return 0


def cmd_validate_maze(args) -> int:
    with open(args.path) as fh:
        maze = parse_maze(fh.read(), os.path.basename(args.path))
    reach = reachable_cells(maze)
    print(f"ok {args.path}: {maze.width}x{maze.height}, {len(maze.floor)} floor, "
          f"{len(reach)} reachable, {len(decision_points(maze))} decision points, "
          f"goal={'yes' if maze.goal else 'no'}, apples={len(maze.apples)}")
    return 0


def cmd_gen_maze(args) -> int:
    text = generate_maze_text(args.width, args.height, args.style, args.seed)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
