"""Roadmap over joint configurations carrying reachable shadow labels.

Vertices are joint configurations; directed edge pairs connect
configurations whose straight joint motion is collision-free. Every vertex
keeps an antichain of reachable contamination labels under the dominance
order "more cleared shadows wins"; labels are propagated across edges to a
fixpoint. A strategy exists as soon as some vertex holds a fully cleared
label, and is recovered by walking label provenance back to the root.

Labels are bitmasks (bit i set = shadow i contaminated). Each edge stores
the flow map of its sweep, so propagating a label across an edge costs a
few bit operations regardless of how many labels cross it.
"""
from __future__ import annotations

import heapq
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .config import BETA, CONNECT_RADIUS_FRAC
from .errors import EmptyGraph, InvalidConfig
from .geometry import Environment, Region, segment_inside
from .shadows import JointConfig, ShadowLabel, ShadowSet, _shadow_geoms, sweep_flow
from .solution import Solution, joint_distance

log = logging.getLogger(__name__)


def dominates(m1: int, m2: int) -> bool:
    """m1 dominates m2 iff every shadow contaminated under m1 is also
    contaminated under m2 (m1 clears at least as much)."""
    return (m1 & ~m2) == 0


@dataclass
class Vertex:
    vid: int
    config: JointConfig
    shadow_geoms: list = field(repr=False, default_factory=list)
    shadow_areas: tuple[float, ...] = ()
    labels: set[int] = field(default_factory=set)
    # First derivation of each mask ever inserted: mask -> (pred vid, pred mask)
    # or None for the root label. Kept even after a mask is dominated away so
    # provenance chains never dangle.
    derivations: dict[int, tuple[int, int] | None] = field(default_factory=dict)
    # Global insertion order of each mask's first appearance at this vertex.
    orders: dict[int, int] = field(default_factory=dict)

    @property
    def shadow_set(self) -> ShadowSet:
        return ShadowSet(tuple(Region(g) for g in self.shadow_geoms))

    def contamination(self, mask: int) -> float:
        return sum(a for i, a in enumerate(self.shadow_areas) if mask >> i & 1)

    def best_mask(self) -> int | None:
        if not self.labels:
            return None
        return min(self.labels, key=self.contamination)


class PursuitGraph:
    """Single-writer roadmap; see module docstring."""

    def __init__(self, env: Environment, n: int,
                 connect_radius: float | None = None,
                 beta: float = BETA,
                 step: float | None = None):
        self.env = env
        self.n = n
        self.beta = beta
        self.step = step
        self._radius_given = connect_radius
        self.vertices: list[Vertex] = []
        self.adj: dict[int, list[tuple[int, tuple[int, ...]]]] = {}
        self.root: int | None = None
        self._configs = np.zeros((0, 2 * n))
        self._edge_pairs: set[tuple[int, int]] = set()
        self.sweep_steps_total = 0
        self._counter = 0

    @property
    def connect_radius(self) -> float:
        if self._radius_given is not None:
            return self._radius_given
        return CONNECT_RADIUS_FRAC * self.env.diameter * math.sqrt(self.n)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        """Undirected connection count (directed edges come in pairs)."""
        return len(self._edge_pairs)

    # -- construction --------------------------------------------------------

    def add_sample(self, c: JointConfig) -> int:
        """Insert a joint configuration, connect it to nearby reachable
        vertices, and propagate labels to a fixpoint."""
        if len(c) != self.n:
            raise InvalidConfig(f"expected {self.n} positions, got {len(c)}")
        for p in c:
            if not self.env.contains(p):
                raise InvalidConfig(f"pursuer position {p} is outside the environment")
        v = Vertex(len(self.vertices), c)
        v.shadow_geoms = _shadow_geoms(self.env, c)
        v.shadow_areas = tuple(g.area for g in v.shadow_geoms)
        self.vertices.append(v)
        self.adj[v.vid] = []
        flat = np.asarray([coord for p in c for coord in p])
        self._configs = np.vstack([self._configs, flat[None, :]])

        seeds: list[tuple[int, int]] = []
        if len(self.vertices) > 1:
            d = np.sqrt(((self._configs[:-1] - flat) ** 2).sum(axis=1))
            order = np.argsort(d)
            for ui in order:
                if d[ui] > self.connect_radius:
                    break
                u = self.vertices[int(ui)]
                if not all(segment_inside(self.env, pu, pv)
                           for pu, pv in zip(u.config, c)):
                    continue
                gd = self._graph_dist(v.vid, u.vid)
                if gd <= self.beta * d[ui]:
                    continue
                self._connect(u, v)
                seeds.extend((u.vid, m) for m in u.labels)
                seeds.extend((v.vid, m) for m in v.labels)
        if seeds:
            self._propagate(seeds)
        return v.vid

    def _connect(self, u: Vertex, v: Vertex) -> None:
        flow = sweep_flow(self.env, u.config, v.config, step=self.step,
                          start_geoms=u.shadow_geoms, end_geoms=v.shadow_geoms)
        self.sweep_steps_total += flow.steps
        self.adj[u.vid].append((v.vid, flow.forward))
        self.adj[v.vid].append((u.vid, flow.backward))
        self._edge_pairs.add((min(u.vid, v.vid), max(u.vid, v.vid)))

    def _graph_dist(self, src: int, dst: int) -> float:
        """Shortest path length between two vertices (inf if disconnected)."""
        if src == dst:
            return 0.0
        dist = {src: 0.0}
        pq = [(0.0, src)]
        while pq:
            d0, x = heapq.heappop(pq)
            if x == dst:
                return d0
            if d0 > dist.get(x, math.inf):
                continue
            for y, _ in self.adj[x]:
                nd = d0 + joint_distance(self.vertices[x].config, self.vertices[y].config)
                if nd < dist.get(y, math.inf):
                    dist[y] = nd
                    heapq.heappush(pq, (nd, y))
        return math.inf

    # -- labels ---------------------------------------------------------------

    def insert_label(self, v: Vertex, mask: int,
                     prov: tuple[int, int] | None = None) -> bool:
        """Insert mask into v's antichain unless dominated; drop any labels
        it dominates. The first derivation of a mask is kept for traceback."""
        for m in v.labels:
            if dominates(m, mask):
                return False
        v.labels = {m for m in v.labels if not dominates(mask, m)}
        v.labels.add(mask)
        if mask not in v.derivations:
            v.derivations[mask] = prov
            v.orders[mask] = self._counter
            self._counter += 1
        return True

    def _propagate(self, seeds: list[tuple[int, int]]) -> None:
        work = list(seeds)
        while work:
            vid, mask = work.pop()
            if mask not in self.vertices[vid].labels:
                continue  # dominated away since queued
            for wid, fwd in self.adj[vid]:
                out = 0
                for j, src in enumerate(fwd):
                    if mask & src:
                        out |= 1 << j
                if self.insert_label(self.vertices[wid], out, prov=(vid, mask)):
                    work.append((wid, out))

    def propagate(self) -> None:
        """Re-run label propagation to fixpoint (idempotent)."""
        self._propagate([(v.vid, m) for v in self.vertices for m in v.labels])

    def set_root(self, c: JointConfig) -> int:
        """(Re)root the graph at c, resetting all labels to the fresh
        all-contaminated state and re-propagating."""
        vid = None
        for v in self.vertices:
            if v.config == c:
                vid = v.vid
                break
        if vid is None:
            vid = self.add_sample(c)
        for v in self.vertices:
            v.labels = set()
            v.derivations = {}
            v.orders = {}
        self._counter = 0
        root = self.vertices[vid]
        mask = (1 << len(root.shadow_areas)) - 1
        root.labels.add(mask)
        root.derivations[mask] = None
        root.orders[mask] = self._counter
        self._counter += 1
        self.root = vid
        self._propagate([(vid, mask)])
        return vid

    # -- team expansion -------------------------------------------------------

    def add_pursuer(self, mode: str) -> None:
        """Grow the team: 'clone' duplicates pursuer 1 in every vertex
        (labels and edges untouched); 'clear' discards the graph."""
        if mode == "clone":
            self.n += 1
            for v in self.vertices:
                v.config = v.config + (v.config[0],)
            if len(self.vertices):
                first = self._configs[:, 0:2]
                self._configs = np.hstack([self._configs, first])
            else:
                self._configs = np.zeros((0, 2 * self.n))
        elif mode == "clear":
            self.n += 1
            self.vertices = []
            self.adj = {}
            self.root = None
            self._configs = np.zeros((0, 2 * self.n))
            self._edge_pairs = set()
        else:
            raise ValueError(f"unknown expansion mode {mode!r}")

    # -- queries ----------------------------------------------------------------

    def best_contamination(self) -> float:
        """Minimum contaminated area over all reachable labels anywhere."""
        if not self.vertices:
            raise EmptyGraph("graph has no vertices")
        best = math.inf
        for v in self.vertices:
            for m in v.labels:
                best = min(best, v.contamination(m))
                if best == 0.0:
                    return 0.0
        return best

    def extract_solution(self) -> Solution | None:
        """Trace a fully cleared label back to the root, if one exists.

        Shadows below the sliver tolerance never get a bit, so a label is
        fully cleared exactly when its mask is zero. Among vertices holding
        one, the earliest discovered is traced (first solution found).
        """
        cleared = [v for v in self.vertices if 0 in v.labels]
        if not cleared:
            return None
        target = min(cleared, key=lambda v: v.orders[0])
        waypoints: list[JointConfig] = []
        vid, mask = target.vid, 0
        while True:
            waypoints.append(self.vertices[vid].config)
            prov = self.vertices[vid].derivations.get(mask, None)
            if prov is None:
                break
            vid, mask = prov
        waypoints.reverse()
        if self.root is not None and waypoints[0] != self.vertices[self.root].config:
            log.warning("extracted path does not start at the root")
        return Solution(self.n, waypoints)

    # -- debug dump ---------------------------------------------------------------

    def dump_json(self, path: str) -> None:
        data = {
            "num_pursuers": self.n,
            "root": self.root,
            "vertices": [
                {"id": v.vid,
                 "config": [[p[0], p[1]] for p in v.config],
                 "labels": ["".join("1" if m >> i & 1 else "0"
                                    for i in range(len(v.shadow_areas)))
                            for m in sorted(v.labels)]}
                for v in self.vertices
            ],
            "edges": sorted(self._edge_pairs),
        }
        with open(path, "w") as f:
            json.dump(data, f, indent=1)
