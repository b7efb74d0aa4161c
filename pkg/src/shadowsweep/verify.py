"""Grid-based contamination simulation: the trusted, slow plan checker.

The free space is rasterized; contamination starts everywhere the initial
team cannot see and, at every motion step, spreads through all currently
unseen free cells (8-connected, modeling an arbitrarily fast evader) while
visible cells are wiped. A strategy is certified iff no contaminated cell
remains at the end.

This checker shares only the raw environment polygon with the analytic
planner; visibility is decided per cell center by segment crossing tests,
and label bookkeeping plays no part.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
from scipy import ndimage

from .errors import ResolutionTooCoarse
from .geometry import Environment
from .solution import Solution

_STRUCT8 = np.ones((3, 3), dtype=bool)


@numba.njit(cache=True)
def _visible_kernel(px: float, py: float, cx: np.ndarray, cy: np.ndarray,
                    edges: np.ndarray, out: np.ndarray) -> None:
    """out[i] = True iff the open segment from (px,py) to cell center i
    crosses no environment edge transversally."""
    for i in range(cx.size):
        qx = cx[i]
        qy = cy[i]
        vis = True
        for m in range(edges.shape[0]):
            ax = edges[m, 0, 0]
            ay = edges[m, 0, 1]
            bx = edges[m, 1, 0]
            by = edges[m, 1, 1]
            d1 = (qx - px) * (ay - py) - (qy - py) * (ax - px)
            d2 = (qx - px) * (by - py) - (qy - py) * (bx - px)
            if d1 * d2 >= 0.0:
                continue
            ex = bx - ax
            ey = by - ay
            d3 = ex * (py - ay) - ey * (px - ax)
            d4 = ex * (qy - ay) - ey * (qx - ax)
            if d3 * d4 >= 0.0:
                continue
            vis = False
            break
        out[i] = vis


class _Grid:
    """Rasterized free space plus per-position visibility masks."""

    def __init__(self, env: Environment, resolution: int):
        if resolution < 64:
            raise ValueError("grid resolution must be at least 64 cells per side")
        xmin, ymin, xmax, ymax = env.bounds
        w, h = xmax - xmin, ymax - ymin
        self.cell = max(w, h) / resolution
        self.nx = max(1, math.ceil(w / self.cell))
        self.ny = max(1, math.ceil(h / self.cell))
        xs = xmin + (np.arange(self.nx) + 0.5) * self.cell
        ys = ymin + (np.arange(self.ny) + 0.5) * self.cell
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        self.free = env.contains_xy(gx.ravel(), gy.ravel()).reshape(self.nx, self.ny)
        self.env = env
        self.fx = gx[self.free]
        self.fy = gy[self.free]
        self._check_corridors()

    def _check_corridors(self) -> None:
        opened = ndimage.binary_opening(self.free, structure=_STRUCT8)
        reach = ndimage.binary_dilation(opened, structure=_STRUCT8)
        stranded = self.free & ~reach
        if stranded.any():
            raise ResolutionTooCoarse(
                f"{int(stranded.sum())} free cells lie in passages narrower than 3 cells")

    def visible_from(self, config) -> np.ndarray:
        """Boolean mask over free cells seen by at least one pursuer."""
        vis = np.zeros(self.fx.size, dtype=np.bool_)
        buf = np.empty(self.fx.size, dtype=np.bool_)
        for p in config:
            q = self.env.interior_point(p)
            _visible_kernel(q[0], q[1], self.fx, self.fy, self.env.edges, buf)
            vis |= buf
        return vis


@dataclass
class GridVerdict:
    cleared: bool
    contaminated_area: float
    contaminated_cells: int
    resolution: int

    def __str__(self) -> str:
        if self.cleared:
            return f"cleared (resolution {self.resolution})"
        return (f"contaminated: {self.contaminated_area:.6g} m^2 "
                f"({self.contaminated_cells} cells at resolution {self.resolution})")


def grid_verify(env: Environment, s: Solution, resolution: int = 256) -> GridVerdict:
    """Simulate an arbitrarily fast evader against the strategy on a grid.

    Motion between waypoints is subdivided so no pursuer moves more than
    half a cell per step. Contamination spreads each step through the free
    cells not currently seen; the verdict is cleared iff nothing remains.
    """
    grid = _Grid(env, resolution)
    free_idx = np.zeros((grid.nx, grid.ny), dtype=np.int64) - 1
    free_idx[grid.free] = np.arange(grid.fx.size)

    visible = grid.visible_from(s.waypoints[0])
    contaminated = ~visible  # over free cells

    half = grid.cell / 2.0
    for a, b in zip(s.waypoints, s.waypoints[1:]):
        if not contaminated.any():
            break
        longest = max(math.dist(pa, pb) for pa, pb in zip(a, b))
        nsteps = max(1, math.ceil(longest / half))
        for k in range(1, nsteps + 1):
            t = k / nsteps
            cfg = tuple((pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))
                        for pa, pb in zip(a, b))
            visible = grid.visible_from(cfg)
            unseen = ~visible
            seeds = contaminated & unseen
            if not seeds.any():
                contaminated = seeds
                break
            # Flood the contamination through currently unseen free cells.
            unseen_grid = np.zeros((grid.nx, grid.ny), dtype=bool)
            unseen_grid[grid.free] = unseen
            labels, _ = ndimage.label(unseen_grid, structure=_STRUCT8)
            flat = labels[grid.free]
            seed_labels = np.unique(flat[seeds])
            contaminated = np.isin(flat, seed_labels[seed_labels > 0])
        if not contaminated.any():
            break

    cells = int(contaminated.sum())
    return GridVerdict(cells == 0, cells * grid.cell * grid.cell, cells, resolution)
