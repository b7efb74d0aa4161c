"""Shadow decompositions and clear/contaminated label evolution.

A shadow set is the list of path-connected components of the free space
minus the union of the pursuers' visibility polygons. Moving the team in a
straight line changes the shadows through four events: appear (born clear),
disappear (label dropped), merge (clear only if every parent was clear) and
split (children inherit the parent).

Events are detected by discretizing the motion into small steps and
matching shadows of consecutive steps by overlap area. The net effect of a
motion is a *flow map*: for every shadow at the end, the set of shadows at
the start whose contamination reaches it. Applying a flow map to a label is
a few bit operations, so one geometric sweep serves any number of labels
crossing the same edge (in either direction).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import shapely

from .config import EPS_AREA, SWEEP_STEPS
from .errors import InvalidConfig, InvalidEdge
from .geometry import Environment, Pt, Region, segment_inside, vis_geom

log = logging.getLogger(__name__)

JointConfig = tuple[Pt, ...]


@dataclass(frozen=True)
class ShadowSet:
    """Shadows of a joint configuration, in deterministic (centroid) order."""

    shadows: tuple[Region, ...]

    @property
    def areas(self) -> tuple[float, ...]:
        return tuple(s.area for s in self.shadows)

    def __len__(self) -> int:
        return len(self.shadows)


@dataclass(frozen=True)
class ShadowLabel:
    """One contamination bit per shadow of an associated ShadowSet."""

    bits: tuple[bool, ...]  # True = contaminated

    @property
    def mask(self) -> int:
        m = 0
        for i, b in enumerate(self.bits):
            if b:
                m |= 1 << i
        return m

    @classmethod
    def from_mask(cls, mask: int, n: int) -> "ShadowLabel":
        return cls(tuple(bool(mask >> i & 1) for i in range(n)))

    @classmethod
    def all_contaminated(cls, n: int) -> "ShadowLabel":
        return cls((True,) * n)

    @property
    def fully_cleared(self) -> bool:
        return not any(self.bits)


def check_config(env: Environment, c: JointConfig) -> None:
    for p in c:
        if not env.contains(p):
            raise InvalidConfig(f"pursuer position {p} is outside the environment")


def shadow_set(env: Environment, c: JointConfig) -> ShadowSet:
    """Components of E minus the union of the team's visibility polygons."""
    check_config(env, c)
    return ShadowSet(tuple(Region(g) for g in _shadow_geoms(env, c)))


def _shadow_geoms(env: Environment, c: JointConfig) -> list:
    """Shadow components as raw shapely polygons in centroid order."""
    shadow = env.polygon
    seen: set[Pt] = set()
    for p in c:
        if p in seen:
            continue
        seen.add(p)
        vis = vis_geom(env, p)
        try:
            shadow = shapely.difference(shadow, vis)
        except shapely.errors.GEOSException:  # rare near-degenerate ring
            shadow = shapely.difference(shadow.buffer(0), vis.buffer(0))
        if shadow.is_empty:
            return []
    parts = [g for g in shapely.get_parts(shadow)
             if g.geom_type == "Polygon" and g.area > EPS_AREA]
    parts.sort(key=lambda g: (g.centroid.x, g.centroid.y))
    return parts


def merge_status(parents: list[bool]) -> bool:
    """Contamination of a merged shadow: contaminated iff any parent is."""
    if not parents:
        raise ValueError("merge needs at least one parent shadow")
    return any(parents)


def contaminated_area(env: Environment, c: JointConfig, label: ShadowLabel) -> float:
    """Total area of the contaminated shadows of c under the given label."""
    ss = shadow_set(env, c)
    if len(ss) != len(label.bits):
        raise ValueError(f"label has {len(label.bits)} bits for {len(ss)} shadows")
    return sum(s.area for s, bit in zip(ss.shadows, label.bits) if bit)


@dataclass
class FlowMap:
    """Net contamination flow of a straight joint motion.

    ``forward[j]`` is a bitmask over starting shadows: ending shadow j is
    contaminated iff any of those starting shadows was. ``backward`` is the
    same for the reversed motion. ``events`` counts (appear, disappear,
    merge, split) occurrences seen along the forward sweep.
    """

    n_start: int
    n_end: int
    forward: tuple[int, ...]
    backward: tuple[int, ...]
    events: tuple[int, int, int, int]
    steps: int

    def apply(self, mask: int) -> int:
        out = 0
        for j, src in enumerate(self.forward):
            if mask & src:
                out |= 1 << j
        return out

    def apply_reverse(self, mask: int) -> int:
        out = 0
        for j, src in enumerate(self.backward):
            if mask & src:
                out |= 1 << j
        return out


def _overlap_parents(old: list, old_bounds: list, new: list, new_bounds: list) -> list[list[int]]:
    """For each component of `new`, the indices of `old` components whose
    intersection with it has more than sliver area."""
    parents: list[list[int]] = []
    for n, nb in zip(new, new_bounds):
        ps = []
        for i, (o, ob) in enumerate(zip(old, old_bounds)):
            if nb[0] > ob[2] or ob[0] > nb[2] or nb[1] > ob[3] or ob[1] > nb[3]:
                continue
            if shapely.intersection(o, n).area > EPS_AREA:
                ps.append(i)
        parents.append(ps)
    return parents


def sweep_flow(env: Environment, a: JointConfig, b: JointConfig,
               step: float | None = None,
               start_geoms: list | None = None,
               end_geoms: list | None = None) -> FlowMap:
    """Discretize the straight joint motion a -> b and fold the shadow
    events into a FlowMap for both directions.

    `step` bounds the per-pursuer displacement between samples and defaults
    to diam(E) / SWEEP_STEPS. Precomputed endpoint shadow components (raw
    shapely polygons in centroid order) may be passed to keep bit order
    identical with cached shadow sets.
    """
    if len(a) != len(b):
        raise InvalidEdge(f"configurations have {len(a)} and {len(b)} pursuers")
    for pa, pb in zip(a, b):
        if not segment_inside(env, pa, pb):
            raise InvalidEdge(f"pursuer segment {pa} -> {pb} leaves the environment")
    if step is None:
        step = env.diameter / SWEEP_STEPS
    longest = max(math.dist(pa, pb) for pa, pb in zip(a, b))
    nsteps = max(1, math.ceil(longest / step))
    if longest == 0.0:
        comps = start_geoms if start_geoms is not None else _shadow_geoms(env, a)
        ident = tuple(1 << i for i in range(len(comps)))
        return FlowMap(len(comps), len(comps), ident, ident, (0, 0, 0, 0), 0)

    old = start_geoms if start_geoms is not None else _shadow_geoms(env, a)
    old_bounds = [g.bounds for g in old]
    fwd = [1 << i for i in range(len(old))]  # mask of start bits feeding comp i
    rel: list[list[list[int]]] = []  # per step: parents of each new comp
    sizes = [len(old)]
    appear = disappear = merge = split = 0

    for k in range(1, nsteps + 1):
        t = k / nsteps
        cfg = tuple((pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))
                    for pa, pb in zip(a, b))
        if k == nsteps and end_geoms is not None:
            new = end_geoms
        else:
            new = _shadow_geoms(env, cfg)
        new_bounds = [g.bounds for g in new]
        parents = _overlap_parents(old, old_bounds, new, new_bounds)
        rel.append(parents)
        sizes.append(len(new))

        child_count = [0] * len(old)
        for ps in parents:
            for i in ps:
                child_count[i] += 1
        appear += sum(1 for ps in parents if not ps)
        disappear += sum(1 for c in child_count if c == 0)
        merge += sum(1 for ps in parents if len(ps) > 1)
        split += sum(1 for c in child_count if c > 1)
        if any(len(ps) > 1 for ps in parents) and any(c > 1 for c in child_count):
            log.debug("merge and split resolved within one sweep step (k=%d/%d)", k, nsteps)

        new_fwd = []
        for ps in parents:
            m = 0
            for i in ps:
                m |= fwd[i]
            new_fwd.append(m)
        fwd = new_fwd
        old = new
        old_bounds = new_bounds

    bwd = [1 << j for j in range(sizes[-1])]
    for parents, n_old in zip(reversed(rel), sizes[-2::-1]):
        new_bwd = [0] * n_old
        for j, ps in enumerate(parents):
            for i in ps:
                new_bwd[i] |= bwd[j]
        bwd = new_bwd

    return FlowMap(sizes[0], sizes[-1], tuple(fwd), tuple(bwd),
                   (appear, disappear, merge, split), nsteps)


def transition(env: Environment, frm: JointConfig, to: JointConfig,
               label: ShadowLabel, step: float | None = None) -> ShadowLabel:
    """Evolve a label across the straight joint motion frm -> to."""
    flow = sweep_flow(env, frm, to, step=step)
    if flow.n_start != len(label.bits):
        raise ValueError(f"label has {len(label.bits)} bits for {flow.n_start} shadows")
    return ShadowLabel.from_mask(flow.apply(label.mask), flow.n_end)
