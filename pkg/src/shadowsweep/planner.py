"""The planning loop: sample, insert, expand the team, extract.

Two modes exist. Fixed mode searches with an exact team size and raises
Timeout when the time limit passes without a solution. Variable mode starts
with one pursuer and grows the team whenever the expansion criterion fires;
a stationary covering team (the trivial solution) bounds the team size and
guarantees termination.

Expansion criteria:
  fixed effort    each team size i gets a share of the time budget from a
                  Poisson profile; alpha fixes the final stage's share.
  stalled progress a pursuer is added when the best contamination fails to
                  improve by 5% (relative) over a window of M samples.
"""
from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from .config import BETA, SP_IMPROVEMENT
from .errors import NoRoot, Timeout
from .geometry import Environment
from .graph import PursuitGraph
from .solution import Solution
from .webs import UniformSampler, WebSampler, place_cover_points

log = logging.getLogger(__name__)


@dataclass
class PlannerConfig:
    pursuers: int | None = None       # fixed team size; None = variable mode
    sampler: str = "ws"               # "ws" | "uniform"
    criterion: str = "fe"             # "fe" | "sp"   (variable mode)
    expand: str = "clone"             # "clone" | "clear"
    alpha: float = 0.001
    window: int = 30                  # M for stalled progress
    time_limit: float = 600.0
    seed: int = 0
    connect_radius: float | None = None
    beta: float = BETA
    delta: float | None = None        # sweep step override
    log_path: str | None = None       # JSONL per-sample progress log

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.window < 1:
            raise ValueError("window must be at least 1")
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.sampler not in ("ws", "uniform"):
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if self.criterion not in ("fe", "sp"):
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if self.expand not in ("clone", "clear"):
            raise ValueError(f"unknown expansion {self.expand!r}")

    @classmethod
    def from_json(cls, path: str) -> "PlannerConfig":
        with open(path) as f:
            return cls(**json.load(f))


@dataclass
class SolveReport:
    solution: Solution | None
    seconds: float
    robots: int
    vertices: int
    edges: int
    samples: int
    trivial_fallback: bool = False
    graph: PursuitGraph | None = None


def poisson_budget(alpha: float, n_max: int, time_limit: float) -> list[float]:
    """Per-team-size time budgets.

    The rate lam solves lam^N e^-lam / N! = alpha (smallest positive root,
    found by bisection); stage i < N gets time_limit * lam^(i-1) e^-lam /
    (i-1)!, and the final stage gets alpha * time_limit exactly.
    """
    if n_max < 1:
        raise ValueError("need at least one stage")
    lam = poisson_rate(alpha, n_max)
    stages = [time_limit * lam ** (i - 1) * math.exp(-lam) / math.factorial(i - 1)
              for i in range(1, n_max)]
    stages.append(alpha * time_limit)
    return stages


def poisson_rate(alpha: float, n_max: int) -> float:
    """Smallest positive root of lam^N e^-lam / N! = alpha via bisection."""
    def f(lam: float) -> float:
        return lam ** n_max * math.exp(-lam) / math.factorial(n_max)

    if alpha >= f(float(n_max)):
        raise NoRoot(f"alpha={alpha} exceeds the maximum {f(float(n_max)):.6g} of the stage profile")
    lo, hi = 0.0, float(n_max)  # f is increasing on [0, N]
    while hi - lo > 1e-12:
        mid = (lo + hi) / 2.0
        if f(mid) < alpha:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def trivial_solution(env: Environment, rng: np.random.Generator) -> tuple[Solution, int]:
    """Stationary pursuers whose visibility jointly covers the environment.

    Placement continues until no shadow component remains (not merely until
    the web coverage threshold), so the result clears instantly. Returns
    the solution and the team-size upper bound it establishes.
    """
    pts, _ = place_cover_points(env, rng, stop_area=0.0)
    if not pts:  # degenerate: area below threshold, still need one pursuer
        pts = [env.interior_point((env.bounds[0], env.bounds[1]))]
    return Solution(len(pts), [tuple(pts)]), len(pts)


class FixedEffort:
    """Stage clock for the fixed-effort criterion."""

    def __init__(self, budgets: list[float]):
        self.budgets = budgets
        self.stage = 1
        self.stage_start = time.monotonic()

    def met(self) -> bool:
        return time.monotonic() - self.stage_start >= self.budgets[self.stage - 1]

    def advance(self) -> None:
        self.stage += 1
        self.stage_start = time.monotonic()


class StalledProgress:
    """Window counter for the stalled-progress criterion.

    The window is anchored at the last observation that improved on the
    anchor value by at least the relative threshold; the criterion fires
    after `window` consecutive samples without such an improvement.
    """

    def __init__(self, window: int, threshold: float = SP_IMPROVEMENT):
        self.window = window
        self.threshold = threshold
        self.anchor: float | None = None
        self.count = 0

    def update(self, best: float) -> None:
        if self.anchor is None:
            self.anchor = best
            self.count = 0
            return
        if self.anchor > 0 and best <= (1.0 - self.threshold) * self.anchor:
            self.anchor = best
            self.count = 0
        else:
            self.count += 1

    def met(self) -> bool:
        return self.count >= self.window

    def reset(self) -> None:
        self.anchor = None
        self.count = 0


def _make_sampler(cfg: PlannerConfig, env: Environment, n: int, rng: np.random.Generator):
    if cfg.sampler == "ws":
        return WebSampler(env, n, rng)
    return UniformSampler(env, n, rng)


class _RunLog:
    def __init__(self, path: str | None):
        self.f = open(path, "w") if path else None

    def write(self, **kv) -> None:
        if self.f:
            self.f.write(json.dumps(kv) + "\n")

    def close(self) -> None:
        if self.f:
            self.f.close()


def solve(env: Environment, cfg: PlannerConfig) -> Solution:
    """Compute a joint strategy that detects any evader; see solve_report."""
    return solve_report(env, cfg).solution


def solve_report(env: Environment, cfg: PlannerConfig) -> SolveReport:
    """Run the sampling loop and return the solution plus run statistics.

    Fixed mode raises Timeout when cfg.time_limit passes without a
    solution; variable mode always returns one.
    """
    t0 = time.monotonic()
    rng = np.random.default_rng(cfg.seed)
    runlog = _RunLog(cfg.log_path)
    try:
        if cfg.pursuers is not None:
            return _solve_fixed(env, cfg, rng, t0, runlog)
        return _solve_variable(env, cfg, rng, t0, runlog)
    finally:
        runlog.close()


def _solve_fixed(env: Environment, cfg: PlannerConfig, rng, t0, runlog) -> SolveReport:
    n = cfg.pursuers
    sampler = _make_sampler(cfg, env, n, rng)
    graph = PursuitGraph(env, n, connect_radius=cfg.connect_radius,
                         beta=cfg.beta, step=cfg.delta)
    p = sampler.next_sample()
    graph.add_sample(p)
    graph.set_root(p)
    samples = 1
    while graph.best_contamination() > 0.0:
        if time.monotonic() - t0 > cfg.time_limit:
            raise Timeout(f"no {n}-pursuer solution within {cfg.time_limit:.0f}s "
                          f"({graph.num_vertices} vertices)")
        p = sampler.next_sample()
        graph.add_sample(p)
        samples += 1
        runlog.write(sample=samples, n=n, best=graph.best_contamination(),
                     elapsed=time.monotonic() - t0)
    sol = graph.extract_solution()
    return SolveReport(sol, time.monotonic() - t0, n,
                       graph.num_vertices, graph.num_edges, samples, graph=graph)


def _solve_variable(env: Environment, cfg: PlannerConfig, rng, t0, runlog) -> SolveReport:
    fallback, n_max = trivial_solution(env, rng)
    sampler = _make_sampler(cfg, env, 1, rng)
    budgets = poisson_budget(cfg.alpha, n_max, cfg.time_limit) if cfg.criterion == "fe" else None
    fe = FixedEffort(budgets) if budgets else None
    sp = StalledProgress(cfg.window) if cfg.criterion == "sp" else None

    graph = PursuitGraph(env, 1, connect_radius=cfg.connect_radius,
                         beta=cfg.beta, step=cfg.delta)
    samples = 0

    def new_root() -> None:
        nonlocal samples
        p = sampler.next_sample()
        graph.add_sample(p)
        graph.set_root(p)
        samples += 1
        if sp:
            sp.reset()
            sp.update(graph.best_contamination())

    def report(sol: Solution, trivial: bool) -> SolveReport:
        return SolveReport(sol, time.monotonic() - t0, sol.n,
                           graph.num_vertices, graph.num_edges, samples, trivial,
                           graph=graph)

    new_root()
    while True:
        if graph.best_contamination() == 0.0:
            return report(graph.extract_solution(), False)
        if time.monotonic() - t0 > cfg.time_limit:
            log.info("time limit reached with %d pursuers; returning the trivial solution", graph.n)
            return report(fallback, True)

        expand = fe.met() if fe else sp.met()
        if expand:
            if graph.n >= n_max:
                log.info("criterion fired at the %d-pursuer bound; returning the trivial solution", n_max)
                return report(fallback, True)
            graph.add_pursuer(cfg.expand)
            sampler.set_team(graph.n)
            if fe:
                fe.advance()
            if sp:
                sp.reset()
            if cfg.expand == "clear":
                new_root()
                continue

        p = sampler.next_sample()
        graph.add_sample(p)
        samples += 1
        best = graph.best_contamination()
        if sp:
            sp.update(best)
        runlog.write(sample=samples, n=graph.n, best=best,
                     elapsed=time.monotonic() - t0)
