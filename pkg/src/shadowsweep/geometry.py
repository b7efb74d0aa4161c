"""2-D polygon kernel: environments, regions, visibility, booleans.

The environment is a simple polygon with optional polygonal holes; the free
space is treated as a closed set, so boundary contact counts as inside.
Region booleans, areas and connected components are delegated to shapely;
visibility queries use a vectorized angular ray cast over the environment
vertices.
"""
from __future__ import annotations

import json
import logging
import math

import numba
import numpy as np
import shapely
from shapely.geometry import MultiPolygon, Point as ShapelyPoint, Polygon as ShapelyPolygon
from shapely.ops import nearest_points, unary_union

from .config import EPS_AREA, EPS_GEOM, NUDGE_FRAC, PRECISION_GRID, RAY_OFFSET
from .errors import EmptyRegion, PointOutsideEnvironment

log = logging.getLogger(__name__)

Pt = tuple[float, float]


def _ring_signed_area(coords: list[Pt]) -> float:
    a = 0.0
    for (x0, y0), (x1, y1) in zip(coords, coords[1:] + coords[:1]):
        a += x0 * y1 - x1 * y0
    return 0.5 * a


class Environment:
    """Bounded, closed, connected polygonal free space with holes.

    The outer ring is stored counterclockwise and holes clockwise; input
    rings with the wrong orientation are flipped (with a log message).
    """

    def __init__(self, outer: list[Pt], holes: list[list[Pt]] | None = None):
        outer = [(float(x), float(y)) for x, y in outer]
        holes = [[(float(x), float(y)) for x, y in h] for h in (holes or [])]
        if _ring_signed_area(outer) < 0:
            log.warning("outer ring was clockwise; reorienting")
            outer = outer[::-1]
        fixed_holes = []
        for i, h in enumerate(holes):
            if _ring_signed_area(h) > 0:
                log.warning("hole %d was counterclockwise; reorienting", i)
                h = h[::-1]
            fixed_holes.append(h)
        holes = fixed_holes

        self.outer = outer
        self.holes = holes
        self.polygon = ShapelyPolygon(outer, holes)
        if not self.polygon.is_valid:
            raise ValueError("environment polygon is invalid (self-intersection or bad holes)")
        # Snapping to a fine grid keeps later boolean ops on GEOS's robust
        # precision model; the grid is far below every other tolerance.
        self.polygon = shapely.set_precision(self.polygon, PRECISION_GRID)
        shell = ShapelyPolygon(outer)
        for i, h in enumerate(holes):
            if not shapely.contains_properly(shell, ShapelyPolygon(h)):
                raise ValueError(f"hole {i} is not strictly inside the outer boundary")

        segs = []
        for ring in [outer] + holes:
            for a, b in zip(ring, ring[1:] + ring[:1]):
                segs.append((a, b))
        self.edges = np.asarray(segs, dtype=np.float64)  # (M, 2, 2)
        self.vertices = np.asarray([v for ring in [outer] + holes for v in ring], dtype=np.float64)

        self.area = self.polygon.area
        xmin, ymin, xmax, ymax = self.polygon.bounds
        self.bounds = (xmin, ymin, xmax, ymax)
        self.diameter = math.hypot(xmax - xmin, ymax - ymin)
        self._nudge = NUDGE_FRAC * self.diameter
        inner = self.polygon.buffer(-self._nudge)
        self._inner = inner if not inner.is_empty else self.polygon
        shapely.prepare(self.polygon)
        shapely.prepare(self._inner)

    # -- containment -------------------------------------------------------

    def contains(self, p: Pt, tol: float = EPS_GEOM) -> bool:
        """True if p lies in the closed free space, within tol."""
        return bool(shapely.dwithin(self.polygon, ShapelyPoint(p), tol))

    def contains_xy(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Vectorized strict containment for many points at once."""
        return shapely.contains_xy(self.polygon, xs, ys)

    def interior_point(self, p: Pt) -> Pt:
        """Return p, nudged inward if it sits on (or within noise of) the boundary."""
        sp = ShapelyPoint(p)
        if self._inner.covers(sp):
            return p
        q = nearest_points(self._inner, sp)[0]
        return (q.x, q.y)

    # -- file format --------------------------------------------------------

    @classmethod
    def from_json(cls, path: str) -> "Environment":
        with open(path) as f:
            data = json.load(f)
        return cls(data["outer"], data.get("holes", []))

    def to_json(self, path: str) -> None:
        with open(path, "w") as f:
            json.dump({"outer": [list(v) for v in self.outer],
                       "holes": [[list(v) for v in h] for h in self.holes]}, f, indent=1)


class Region:
    """A polygonal subset of the free space, possibly disconnected."""

    def __init__(self, geom):
        if geom is None or geom.is_empty:
            self.geom = MultiPolygon([])
        elif geom.geom_type == "Polygon":
            self.geom = geom
        elif geom.geom_type == "MultiPolygon":
            self.geom = geom
        else:
            # GeometryCollection from noisy booleans: keep the areal parts.
            polys = [g for g in getattr(geom, "geoms", []) if g.geom_type in ("Polygon", "MultiPolygon")]
            self.geom = unary_union(polys) if polys else MultiPolygon([])

    @property
    def area(self) -> float:
        return self.geom.area

    @property
    def is_empty(self) -> bool:
        return self.geom.is_empty or self.geom.area <= EPS_AREA

    def components(self) -> list["Region"]:
        """Path-connected pieces with area above the sliver tolerance,
        ordered by centroid (x, then y)."""
        if self.geom.is_empty:
            return []
        if self.geom.geom_type == "Polygon":
            parts = [self.geom]
        else:
            parts = [g for g in self.geom.geoms if not g.is_empty]
        parts = [g for g in parts if g.area > EPS_AREA]
        parts.sort(key=lambda g: (g.centroid.x, g.centroid.y))
        return [Region(g) for g in parts]

    def contains(self, p: Pt, tol: float = EPS_GEOM) -> bool:
        return bool(shapely.dwithin(self.geom, ShapelyPoint(p), tol))

    def __repr__(self) -> str:
        return f"Region(area={self.area:.6g}, parts={len(self.components())})"


def area(r: Region) -> float:
    """Total area of a region (components minus their holes)."""
    return r.area


def components(r: Region) -> list[Region]:
    """Split a region into its path-connected components."""
    return r.components()


# -- visibility -------------------------------------------------------------

@numba.njit(cache=True, fastmath=False)
def _ray_hits_kernel(qx: float, qy: float, angles: np.ndarray, edges: np.ndarray,
                     verts: np.ndarray, tiny: float, snap2: float) -> np.ndarray:
    """Nearest boundary hit along each ray from q; hits within sqrt(snap2)
    of an environment vertex are snapped onto it. Rays that hit nothing
    (degenerate) are marked with NaN."""
    nr = angles.size
    nm = edges.shape[0]
    out = np.empty((nr, 2))
    for r in range(nr):
        dx = math.cos(angles[r])
        dy = math.sin(angles[r])
        tmin = np.inf
        for m in range(nm):
            ax = edges[m, 0, 0]
            ay = edges[m, 0, 1]
            ex = edges[m, 1, 0] - ax
            ey = edges[m, 1, 1] - ay
            denom = dx * ey - dy * ex
            if abs(denom) < 1e-15:
                continue
            aqx = ax - qx
            aqy = ay - qy
            t = (aqx * ey - aqy * ex) / denom
            if t <= tiny or t >= tmin:
                continue
            u = (aqx * dy - aqy * dx) / denom
            if u < -1e-12 or u > 1.0 + 1e-12:
                continue
            tmin = t
        if np.isfinite(tmin):
            hx = qx + tmin * dx
            hy = qy + tmin * dy
            best = -1
            bd = snap2
            for v in range(verts.shape[0]):
                dd = (verts[v, 0] - hx) ** 2 + (verts[v, 1] - hy) ** 2
                if dd < bd:
                    bd = dd
                    best = v
            if best >= 0:
                hx = verts[best, 0]
                hy = verts[best, 1]
            out[r, 0] = hx
            out[r, 1] = hy
        else:
            out[r, 0] = np.nan
            out[r, 1] = np.nan
    return out


def _ray_hits(env: Environment, q: Pt) -> np.ndarray:
    """Cast rays from q toward every vertex (plus slightly offset rays) and
    return the nearest boundary hit per ray, sorted by angle.

    Snapping near-vertex hits onto the exact vertex removes hairline
    slivers along the boundary caused by the offset rays.
    """
    qa = np.asarray(q, dtype=np.float64)
    rel = env.vertices - qa
    base = np.arctan2(rel[:, 1], rel[:, 0])
    ang = np.sort(np.concatenate([base - RAY_OFFSET, base, base + RAY_OFFSET]))
    snap = 1e-6 * env.diameter
    hits = _ray_hits_kernel(qa[0], qa[1], ang, env.edges, env.vertices,
                            1e-13 * env.diameter, snap * snap)
    return hits[np.isfinite(hits[:, 0])]


def vis_geom(env: Environment, p: Pt):
    """Visibility polygon of p as a raw shapely geometry (fast path).

    Assumes p lies in E; points on or within noise of the boundary are
    nudged inward before casting rays.
    """
    if not shapely.contains_xy(env._inner, p[0], p[1]):
        q = env.interior_point(p)
    else:
        q = p
    hits = _ray_hits(env, q)
    if len(hits) < 3:
        return ShapelyPolygon()
    # Drop consecutive duplicates (offset rays often hit the same spot).
    keep = np.ones(len(hits), dtype=bool)
    keep[1:] = np.hypot(*(hits[1:] - hits[:-1]).T) > 1e-12 * env.diameter
    hits = hits[keep]
    if len(hits) >= 2 and np.hypot(*(hits[0] - hits[-1])) <= 1e-12 * env.diameter:
        hits = hits[:-1]
    if len(hits) < 3:
        return ShapelyPolygon()
    poly = shapely.set_precision(ShapelyPolygon(hits), PRECISION_GRID)
    if not poly.is_valid:
        poly = shapely.make_valid(poly)
    if poly.geom_type != "Polygon":
        qp = ShapelyPoint(q)
        parts = [g for g in shapely.get_parts(poly) if g.geom_type == "Polygon"]
        if not parts:
            return ShapelyPolygon()
        poly = max(parts, key=lambda g: (g.covers(qp), g.area))
    return poly


def visibility_polygon(env: Environment, p: Pt) -> Region:
    """All points of E visible from p (segment to p stays inside closed E).

    Raises PointOutsideEnvironment if p is farther than the incidence
    tolerance from the free space.
    """
    if not env.contains(p):
        raise PointOutsideEnvironment(f"point {p} is outside the environment")
    return Region(vis_geom(env, p))


def segment_inside(env: Environment, p: Pt, q: Pt) -> bool:
    """True iff the closed segment pq lies in the closed free space."""
    if not (env.contains(p) and env.contains(q)):
        return False
    px, py = p
    qx, qy = q
    if px == qx and py == qy:
        return True
    a = env.edges[:, 0, :]
    b = env.edges[:, 1, :]
    # Orientation of edge endpoints relative to segment pq, and vice versa.
    d1 = (qx - px) * (a[:, 1] - py) - (qy - py) * (a[:, 0] - px)
    d2 = (qx - px) * (b[:, 1] - py) - (qy - py) * (b[:, 0] - px)
    ex = b[:, 0] - a[:, 0]
    ey = b[:, 1] - a[:, 1]
    d3 = ex * (py - a[:, 1]) - ey * (px - a[:, 0])
    d4 = ex * (qy - a[:, 1]) - ey * (qx - a[:, 0])
    crossing = (d1 * d2 < 0) & (d3 * d4 < 0)
    if bool(crossing.any()):
        return False
    # No proper crossing can still exit E through a non-transversal contact
    # (grazing a spike vertex or running along an edge); spot-check a few
    # interior points of the segment.
    for t in (0.25, 0.5, 0.75):
        if not env.contains((px + t * (qx - px), py + t * (qy - py))):
            return False
    return True


def subtract(env: Environment, cover: list[Region]) -> Region:
    """E minus the union of the given regions."""
    if not cover:
        return Region(env.polygon)
    union = unary_union([r.geom for r in cover if not r.geom.is_empty])
    if union.is_empty:
        return Region(env.polygon)
    return Region(env.polygon.difference(union))


def random_point(r: Region, rng: np.random.Generator) -> Pt:
    """Uniform-over-area point inside r (component chosen by area, then
    rejection sampling within the component's bounding box)."""
    if r.area <= EPS_AREA:
        raise EmptyRegion("cannot sample a point from an (effectively) empty region")
    parts = r.components()
    if not parts:
        raise EmptyRegion("region is all sliver components")
    weights = np.array([p.area for p in parts])
    idx = int(rng.choice(len(parts), p=weights / weights.sum()))
    geom = parts[idx].geom
    xmin, ymin, xmax, ymax = geom.bounds
    shapely.prepare(geom)
    for _ in range(80):
        xs = rng.uniform(xmin, xmax, 256)
        ys = rng.uniform(ymin, ymax, 256)
        hit = shapely.contains_xy(geom, xs, ys)
        if hit.any():
            i = int(np.argmax(hit))
            return (float(xs[i]), float(ys[i]))
    q = geom.representative_point()  # pathological sliver; still inside
    return (float(q.x), float(q.y))
