"""Benchmark harness: seeded trials per scenario, summary statistics.

A scenario is either fixed ("ws:2", "uniform:3") or variable ("fe:clone",
"sp:clear"). Each trial runs an independently seeded solve; trials that hit
the time limit count as failures and are excluded from the statistics but
reported through the success rate.
"""
from __future__ import annotations

import csv
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .corpus import get as corpus_get
from .errors import Timeout
from .geometry import Environment
from .planner import PlannerConfig, solve_report

CSV_COLUMNS = ["scenario", "success_rate", "time_mu", "time_sigma",
               "robots_mu", "robots_sigma", "vertices_mu", "vertices_sigma",
               "edges_mu", "edges_sigma"]


def scenario_config(spec: str, time_limit: float, seed: int) -> PlannerConfig:
    """Parse 'sampler:n' (fixed) or 'criterion:expand' (variable)."""
    kind, _, arg = spec.partition(":")
    if kind in ("ws", "uniform"):
        return PlannerConfig(pursuers=int(arg), sampler=kind,
                             time_limit=time_limit, seed=seed)
    if kind in ("fe", "sp"):
        return PlannerConfig(criterion=kind, expand=arg or "clone",
                             time_limit=time_limit, seed=seed)
    raise ValueError(f"bad scenario {spec!r}; expected e.g. ws:2, uniform:3, fe:clone, sp:clear")


def _run_trial(args: tuple[str, str, float, int]) -> dict:
    env_name, scenario, time_limit, seed = args
    env = _load_env(env_name)
    cfg = scenario_config(scenario, time_limit, seed)
    try:
        rep = solve_report(env, cfg)
        return {"ok": True, "time": rep.seconds, "robots": rep.robots,
                "vertices": rep.vertices, "edges": rep.edges}
    except Timeout:
        return {"ok": False}


def _load_env(name: str) -> Environment:
    import os
    if os.path.exists(name):
        return Environment.from_json(name)
    return corpus_get(name)


@dataclass
class ScenarioStats:
    scenario: str
    trials: int
    successes: int
    rows: list[dict]

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    def _stat(self, key: str) -> tuple[float | None, float | None]:
        vals = [r[key] for r in self.rows if r["ok"]]
        if not vals:
            return None, None
        mu = statistics.fmean(vals)
        sigma = statistics.pstdev(vals) if len(vals) > 1 else 0.0
        return mu, sigma

    def csv_row(self) -> list:
        def fmt(v):
            return "n/a" if v is None else f"{v:.3f}"
        row = [self.scenario, f"{self.success_rate:.2f}"]
        for key in ("time", "robots", "vertices", "edges"):
            mu, sigma = self._stat(key)
            row += [fmt(mu), fmt(sigma)]
        return row


def run_bench(envs: list[str], scenarios: list[str], trials: int,
              time_limit: float, seed_base: int, jobs: int = 1) -> list[ScenarioStats]:
    tasks = []
    for env in envs:
        for sc in scenarios:
            for t in range(trials):
                tasks.append((env, sc, time_limit, seed_base + t))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_trial, tasks))
    else:
        results = [_run_trial(t) for t in tasks]

    stats = []
    i = 0
    for env in envs:
        for sc in scenarios:
            rows = results[i:i + trials]
            i += trials
            stats.append(ScenarioStats(f"{env}/{sc}", trials,
                                       sum(r["ok"] for r in rows), rows))
    return stats


def write_csv(stats: list[ScenarioStats], path: str) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_COLUMNS)
        for s in stats:
            w.writerow(s.csv_row())


def format_table(stats: list[ScenarioStats]) -> str:
    rows = [CSV_COLUMNS] + [[str(c) for c in s.csv_row()] for s in stats]
    widths = [max(len(r[i]) for r in rows) for i in range(len(CSV_COLUMNS))]
    lines = []
    for j, r in enumerate(rows):
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        if j == 0:
            lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
    return "\n".join(lines)
