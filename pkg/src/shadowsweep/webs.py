"""Web construction and joint-configuration samplers.

A web is a small point set W = P u Q: initial points P chosen sequentially
from the region still unseen until the whole environment is covered, plus
one intersection point Q for every pair of initial points whose visibility
polygons overlap. Webs concentrate samples at junctions and corners, the
spots that decide visibility searches.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

import numpy as np
import shapely

from .config import EPS_AREA, EPS_COVER_FRAC
from .errors import CoverageStall, EmptyRegion
from .geometry import Environment, Pt, Region, random_point, segment_inside, vis_geom
from .shadows import JointConfig

log = logging.getLogger(__name__)


@dataclass
class Web:
    initial_points: list[Pt]
    intersection_points: list[Pt]
    pairs: list[tuple[int, int]]  # generating (i, j) per intersection point

    @property
    def points(self) -> list[Pt]:
        return self.initial_points + self.intersection_points

    def __len__(self) -> int:
        return len(self.initial_points) + len(self.intersection_points)

    def to_json(self, path: str) -> None:
        with open(path, "w") as f:
            json.dump({"initial_points": [list(p) for p in self.initial_points],
                       "intersection_points": [list(p) for p in self.intersection_points],
                       "pairs": [list(pr) for pr in self.pairs]}, f, indent=1)

    @classmethod
    def from_json(cls, path: str) -> "Web":
        with open(path) as f:
            d = json.load(f)
        return cls([tuple(p) for p in d["initial_points"]],
                   [tuple(p) for p in d["intersection_points"]],
                   [tuple(pr) for pr in d["pairs"]])


def place_cover_points(env: Environment, rng: np.random.Generator,
                       stop_area: float) -> tuple[list[Pt], list]:
    """Place random points, each drawn from the region not yet seen, until
    the unseen residue drops to stop_area. Returns the points and their
    visibility polygons (raw geometries)."""
    remaining = env.polygon
    pts: list[Pt] = []
    vis: list = []
    smallest = math.inf
    while remaining.area > stop_area:
        try:
            p = random_point(Region(remaining), rng)
        except EmptyRegion:
            break  # residue is sliver dust below the component tolerance
        v = vis_geom(env, p)
        pts.append(p)
        vis.append(v)
        smallest = min(smallest, v.area)
        remaining = shapely.difference(remaining, v)
        cap = 10 * math.ceil(env.area / max(smallest, EPS_AREA))
        if len(pts) > cap:
            raise CoverageStall(
                f"{len(pts)} points placed without covering the environment")
    return pts, vis


def build_web(env: Environment, rng: np.random.Generator) -> Web:
    """Construct a web: cover points P plus one random point inside every
    non-empty pairwise visibility intersection."""
    pts, vis = place_cover_points(env, rng, EPS_COVER_FRAC * env.area)
    inter_pts: list[Pt] = []
    pairs: list[tuple[int, int]] = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            inter = shapely.intersection(vis[i], vis[j])
            if inter.area <= EPS_AREA:
                continue
            q = random_point(Region(inter), rng)
            inter_pts.append(q)
            pairs.append((i, j))
    web = Web(pts, inter_pts, pairs)
    if not _mutual_visibility_connected(env, web.points):
        log.warning("web of %d points is not a connected roadmap", len(web))
    return web


def _mutual_visibility_connected(env: Environment, pts: list[Pt]) -> bool:
    """Is the mutual-visibility graph over the points connected?"""
    k = len(pts)
    if k <= 1:
        return True
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(k):
            if j not in seen and segment_inside(env, pts[i], pts[j]):
                seen.add(j)
                stack.append(j)
    return len(seen) == k


class WebSampler:
    """Per-pursuer webs drawn without replacement.

    Each pursuer owns a web; a joint sample takes the next unused point of
    every web. When any web runs dry, all webs are rebuilt before drawing.
    """

    def __init__(self, env: Environment, n: int, rng: np.random.Generator):
        self.env = env
        self.rng = rng
        self.webs: list[Web] = []
        self._orders: list[list[int]] = []
        self._cursors: list[int] = []
        self.regenerations = 0
        self.set_team(n)

    @property
    def n(self) -> int:
        return len(self.webs)

    def set_team(self, n: int) -> None:
        while len(self.webs) < n:
            self._add_web()

    def _add_web(self) -> None:
        web = build_web(self.env, self.rng)
        self.webs.append(web)
        self._orders.append(list(self.rng.permutation(len(web))))
        self._cursors.append(0)

    def _regenerate_all(self) -> None:
        n = self.n
        self.webs = []
        self._orders = []
        self._cursors = []
        for _ in range(n):
            self._add_web()
        self.regenerations += 1

    def next_sample(self) -> JointConfig:
        if any(cur >= len(web) for cur, web in zip(self._cursors, self.webs)):
            self._regenerate_all()
        out = []
        for i, web in enumerate(self.webs):
            pts = web.points
            out.append(pts[self._orders[i][self._cursors[i]]])
            self._cursors[i] += 1
        return tuple(out)


class UniformSampler:
    """Independent uniform-over-area positions for every pursuer (the
    baseline sampling strategy)."""

    def __init__(self, env: Environment, n: int, rng: np.random.Generator):
        self.env = env
        self.rng = rng
        self._n = n
        self._region = Region(env.polygon)

    @property
    def n(self) -> int:
        return self._n

    def set_team(self, n: int) -> None:
        self._n = n

    def next_sample(self) -> JointConfig:
        return tuple(random_point(self._region, self.rng) for _ in range(self._n))
