"""Command-line front end: solve, refine, verify, render, web, bench."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import bench as bench_mod
from .corpus import get as corpus_get, names as corpus_names
from .errors import ShadowSweepError, Timeout
from .geometry import Environment
from .planner import PlannerConfig, solve_report
from .refine import refine
from .render import render_svg
from .solution import Solution
from .verify import grid_verify
from .webs import Web, build_web

log = logging.getLogger(__name__)


def load_env(spec: str) -> Environment:
    """An environment JSON path, or a built-in corpus name."""
    if os.path.exists(spec):
        return Environment.from_json(spec)
    try:
        return corpus_get(spec)
    except KeyError:
        raise SystemExit(f"error: {spec!r} is neither a file nor one of {corpus_names()}")


def _add_planner_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pursuers", type=int, help="fixed team size")
    p.add_argument("--variable", action="store_true", help="let the planner grow the team")
    p.add_argument("--sampler", choices=("ws", "uniform"))
    p.add_argument("--criterion", choices=("fe", "sp"),
                   help="team expansion criterion in variable mode")
    p.add_argument("--expand", choices=("clone", "clear"))
    p.add_argument("--alpha", type=float, help="final-stage time fraction for the fe criterion")
    p.add_argument("--M", type=int, dest="window", help="sample window for the sp criterion")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--connect-radius", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--delta", type=float, help="shadow sweep step length")
    p.add_argument("--config", help="JSON file with PlannerConfig fields (flags override)")
    p.add_argument("--log", dest="log_path", help="JSONL per-sample progress log")


def _planner_config(args: argparse.Namespace) -> PlannerConfig:
    base: dict = {}
    if args.config:
        with open(args.config) as f:
            base = json.load(f)
    if args.variable and args.pursuers:
        raise SystemExit("error: choose either --pursuers or --variable")
    for key in ("sampler", "criterion", "expand", "alpha", "window", "time_limit",
                "seed", "connect_radius", "beta", "delta", "log_path"):
        val = getattr(args, key)
        if val is not None:
            base[key] = val
    if args.pursuers is not None:
        base["pursuers"] = args.pursuers
    elif args.variable:
        base["pursuers"] = None
    if base.get("pursuers") is None and not args.variable:
        raise SystemExit("error: choose --pursuers N or --variable")
    return PlannerConfig(**base)


def cmd_solve(args) -> int:
    env = load_env(args.env)
    cfg = _planner_config(args)
    try:
        rep = solve_report(env, cfg)
    except Timeout as e:
        print(f"failure: {e}")
        return 1
    sol = rep.solution
    sol.to_json(args.output)
    print(f"solved with {rep.robots} pursuers in {rep.seconds:.1f}s: "
          f"{rep.vertices} vertices, {rep.edges} edges, path length {sol.length():.1f} m"
          + (" (trivial fallback)" if rep.trivial_fallback else ""))
    if args.dump_graph and rep.graph is not None:
        rep.graph.dump_json(args.dump_graph)
    return 0


def cmd_refine(args) -> int:
    env = load_env(args.env)
    sol = Solution.from_json(args.solution)
    out = refine(env, sol, step=args.delta)
    out.to_json(args.output)
    print(f"length {sol.length():.1f} m -> {out.length():.1f} m "
          f"({(1 - out.length() / sol.length()) * 100 if sol.length() else 0:.0f}% shorter)")
    return 0


def cmd_verify(args) -> int:
    env = load_env(args.env)
    sol = Solution.from_json(args.solution)
    verdict = grid_verify(env, sol, resolution=args.resolution)
    print(verdict)
    return 0 if verdict.cleared else 1


def cmd_render(args) -> int:
    env = load_env(args.env)
    sol = Solution.from_json(args.solution) if args.solution else None
    web = Web.from_json(args.web) if args.web else None
    graph_data = None
    if args.graph:
        with open(args.graph) as f:
            graph_data = json.load(f)
    svg = render_svg(env, solution=sol, web=web, graph_data=graph_data)
    with open(args.output, "w") as f:
        f.write(svg)
    print(f"wrote {args.output}")
    return 0


def cmd_web(args) -> int:
    env = load_env(args.env)
    rng = np.random.default_rng(args.seed)
    web = build_web(env, rng)
    web.to_json(args.output)
    print(f"web with {len(web.initial_points)} initial and "
          f"{len(web.intersection_points)} intersection points -> {args.output}")
    return 0


def cmd_bench(args) -> int:
    envs = args.envs.split(",") if args.envs else corpus_names()
    scenarios = args.scenarios.split(",")
    stats = bench_mod.run_bench(envs, scenarios, trials=args.trials,
                                time_limit=args.time_limit,
                                seed_base=args.seed_base, jobs=args.jobs)
    print(bench_mod.format_table(stats))
    if args.output:
        bench_mod.write_csv(stats, args.output)
        print(f"wrote {args.output}")
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    ap = argparse.ArgumentParser(prog="shadowsweep",
                                 description="multi-pursuer visibility search planner")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a strategy")
    p.add_argument("env", help="environment JSON or corpus name")
    _add_planner_flags(p)
    p.add_argument("-o", "--output", default="solution.json")
    p.add_argument("--dump-graph", help="write the final graph as JSON")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("refine", help="shorten a strategy")
    p.add_argument("env")
    p.add_argument("solution")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("-o", "--output", default="refined.json")
    p.set_defaults(fn=cmd_refine)

    p = sub.add_parser("verify", help="grid-check a strategy")
    p.add_argument("env")
    p.add_argument("solution")
    p.add_argument("--resolution", type=int, default=256)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("render", help="draw environment, strategy, web or graph as SVG")
    p.add_argument("env")
    p.add_argument("--solution")
    p.add_argument("--web")
    p.add_argument("--graph")
    p.add_argument("-o", "--output", default="out.svg")
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("web", help="build and dump a web")
    p.add_argument("env")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="web.json")
    p.set_defaults(fn=cmd_web)

    p = sub.add_parser("bench", help="seeded trial sweeps with summary statistics")
    p.add_argument("--envs", help="comma-separated corpus names or files (default: all corpus)")
    p.add_argument("--scenarios", default="ws:2,uniform:2,fe:clone,fe:clear,sp:clone,sp:clear")
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--time-limit", type=float, default=600.0)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output", help="CSV output path")
    p.set_defaults(fn=cmd_bench)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ShadowSweepError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
