"""Shortcut smoothing of joint strategies, validated by shadow replay.

A shortcut replaces an arc of the path in E^n by the straight segment
between its endpoints. Besides being collision-free, the shortened path
must still clear every shadow; that is decided by replaying the shadow
events along the changed part and pushing the resulting label through the
(precomposed) flow maps of the untouched suffix.

The scan follows a geometric schedule: the cut length starts at the whole
path length and decays by a fixed factor per level while the cut start
advances along the path; accepted shortcuts immediately replace the path
and scanning continues in place.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .config import (CUT_DECAY, CUT_MIN_FRAC, CUT_START_DIVISOR, EPS_LEN_FRAC)
from .errors import NotASolution
from .geometry import Environment, segment_inside
from .shadows import JointConfig, _shadow_geoms, sweep_flow
from .solution import Solution, joint_distance

log = logging.getLogger(__name__)


def is_solution(env: Environment, waypoints: list[JointConfig],
                step: float | None = None) -> bool:
    """True iff consecutive waypoints are per-pursuer collision-free and the
    replay from an all-contaminated start ends fully cleared."""
    if not waypoints:
        return False
    for a, b in zip(waypoints, waypoints[1:]):
        if len(a) != len(b):
            return False
        if not all(segment_inside(env, pa, pb) for pa, pb in zip(a, b)):
            return False
    geoms = _shadow_geoms(env, waypoints[0])
    mask = (1 << len(geoms)) - 1
    for a, b in zip(waypoints, waypoints[1:]):
        if mask == 0:
            return True  # nothing contaminated can ever come back
        flow = sweep_flow(env, a, b, step=step, start_geoms=geoms)
        mask = flow.apply(mask)
        geoms = None  # only the first hop can reuse cached start geometry
    return mask == 0


def _interp(a: JointConfig, b: JointConfig, t: float) -> JointConfig:
    return tuple((pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))
                 for pa, pb in zip(a, b))


def _compress(waypoints: list[JointConfig]) -> list[JointConfig]:
    """Drop duplicate and collinear interior waypoints (same polyline)."""
    out = [waypoints[0]]
    for w in waypoints[1:]:
        if joint_distance(out[-1], w) < 1e-12:
            continue
        out.append(w)
    i = 1
    while i < len(out) - 1:
        a, b, c = out[i - 1], out[i], out[i + 1]
        dab = joint_distance(a, b)
        dbc = joint_distance(b, c)
        dac = joint_distance(a, c)
        if dab + dbc - dac < 1e-12 * max(dac, 1.0):
            del out[i]
        else:
            i += 1
    return out


class _PathState:
    """Subdivided path with per-breakpoint labels and suffix flow maps."""

    def __init__(self, env: Environment, waypoints: list[JointConfig],
                 piece_len: float, step: float | None,
                 flow_cache: dict):
        self.env = env
        self.step = step
        self.piece_len = piece_len
        self.cache = flow_cache
        self._build(waypoints)

    def _build(self, waypoints: list[JointConfig]) -> None:
        bps: list[JointConfig] = [waypoints[0]]
        for a, b in zip(waypoints, waypoints[1:]):
            hop = joint_distance(a, b)
            pieces = max(1, math.ceil(hop / self.piece_len)) if hop > 0 else 0
            for k in range(1, pieces + 1):
                bps.append(_interp(a, b, k / pieces))
        self.bps = bps
        self.s = [0.0]
        for a, b in zip(bps, bps[1:]):
            self.s.append(self.s[-1] + joint_distance(a, b))
        self.geoms = [_shadow_geoms(self.env, c) for c in bps]
        self.flows = []
        for i in range(len(bps) - 1):
            key = (bps[i], bps[i + 1])
            flow = self.cache.get(key)
            if flow is None:
                flow = sweep_flow(self.env, bps[i], bps[i + 1], step=self.step,
                                  start_geoms=self.geoms[i], end_geoms=self.geoms[i + 1])
                self.cache[key] = flow
            self.flows.append(flow)
        # Replay masks at every breakpoint.
        self.masks = [(1 << len(self.geoms[0])) - 1]
        for flow in self.flows:
            self.masks.append(flow.apply(self.masks[-1]))
        # Composed flow from each breakpoint to the end; suffix[k][j] is the
        # mask of breakpoint-k shadows whose contamination reaches final
        # shadow j. forced_clear marks suffixes that kill every label.
        n_end = len(self.geoms[-1])
        suffix = [tuple(1 << j for j in range(n_end))]
        for flow in reversed(self.flows):
            prev = suffix[-1]
            comp = []
            for j in range(n_end):
                m = prev[j]
                src = 0
                for i in range(flow.n_end):
                    if m >> i & 1:
                        src |= flow.forward[i]
                comp.append(src)
            suffix.append(tuple(comp))
        suffix.reverse()
        self.suffix = suffix
        self.forced_clear = [all(m == 0 for m in sx) for sx in suffix]

    @property
    def length(self) -> float:
        return self.s[-1]

    def final_mask_with_shortcut(self, ia: int, ib: int) -> int | None:
        """Final mask if the arc bps[ia..ib] is replaced by a straight
        segment, or None when the shortcut geometry cannot be validated."""
        if self.masks[ia] == 0:
            return 0
        if self.forced_clear[ib]:
            return 0
        flow = sweep_flow(self.env, self.bps[ia], self.bps[ib], step=self.step,
                          start_geoms=self.geoms[ia], end_geoms=self.geoms[ib])
        mask_b = flow.apply(self.masks[ia])
        out = 0
        sx = self.suffix[ib]
        for j, src in enumerate(sx):
            if mask_b & src:
                out |= 1 << j
        return out

    def accept(self, ia: int, ib: int) -> None:
        """Replace the arc by the straight shortcut and rebuild."""
        new_wps = _compress(self.bps[: ia + 1] + self.bps[ib:])
        self._build(new_wps)


def refine(env: Environment, s: Solution, step: float | None = None) -> Solution:
    """Greedy shadow-aware shortcutting; never lengthens the path and the
    result clears the environment whenever the input does."""
    if not is_solution(env, s.waypoints, step=step):
        raise NotASolution("refinement requires a valid input strategy")

    # Drop everything after the first fully cleared waypoint.
    waypoints = _truncate_cleared(env, s.waypoints, step)
    waypoints = _compress(waypoints)
    if len(waypoints) < 2:
        return Solution(s.n, waypoints)

    total0 = Solution(s.n, waypoints).length()
    eps_len = EPS_LEN_FRAC * total0
    piece = max(total0 * CUT_MIN_FRAC, 1e-9)
    state = _PathState(env, waypoints, piece, step, flow_cache={})

    c = total0
    c_min = total0 * CUT_MIN_FRAC
    while c >= c_min and len(state.bps) > 2:
        ia = 0
        while ia < len(state.bps) - 2:
            sa = state.s[ia]
            # Endpoint of the cut: first breakpoint at least c further on.
            ib = None
            for j in range(ia + 1, len(state.bps)):
                if state.s[j] - sa >= c:
                    ib = j
                    break
            if ib is None:
                break
            cut = state.s[ib] - sa
            gain = cut - joint_distance(state.bps[ia], state.bps[ib])
            if gain >= eps_len and _collision_free(env, state.bps[ia], state.bps[ib]):
                if state.final_mask_with_shortcut(ia, ib) == 0:
                    state.accept(ia, ib)
                    continue  # rescan at the same (c, z_a)
            ia += _advance(state, ia, c / CUT_START_DIVISOR)
        c *= CUT_DECAY

    out = _compress(state.bps)
    return Solution(s.n, out)


def _advance(state: _PathState, ia: int, dist: float) -> int:
    """Number of breakpoints that moves z_a forward by about `dist`."""
    target = state.s[ia] + dist
    j = ia + 1
    while j < len(state.s) - 1 and state.s[j] < target:
        j += 1
    return max(1, j - ia)


def _collision_free(env: Environment, a: JointConfig, b: JointConfig) -> bool:
    return all(segment_inside(env, pa, pb) for pa, pb in zip(a, b))


def _truncate_cleared(env: Environment, waypoints: list[JointConfig],
                      step: float | None) -> list[JointConfig]:
    geoms = _shadow_geoms(env, waypoints[0])
    mask = (1 << len(geoms)) - 1
    if mask == 0:
        return waypoints[:1]
    for i, (a, b) in enumerate(zip(waypoints, waypoints[1:])):
        flow = sweep_flow(env, a, b, step=step, start_geoms=geoms)
        geoms = None
        mask = flow.apply(mask)
        if mask == 0:
            return waypoints[: i + 2]
    return waypoints
