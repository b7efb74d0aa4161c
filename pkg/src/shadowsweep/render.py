"""SVG rendering of environments, strategies, webs and graphs.

Conventions: one color per pursuer, filled circle at the initial position,
hollow circle at the final one; web initial points red, intersection points
blue, with green edges joining each intersection point to its two
generating initial points.
"""
from __future__ import annotations

from .geometry import Environment
from .solution import Solution
from .webs import Web

PURSUER_COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                  "#ff7f0e", "#8c564b", "#17becf", "#bcbd22"]
SCALE = 60.0  # svg units per meter
MARGIN = 0.6  # meters


class _Canvas:
    def __init__(self, env: Environment):
        xmin, ymin, xmax, ymax = env.bounds
        self.xmin = xmin - MARGIN
        self.ymax = ymax + MARGIN
        self.w = (xmax - xmin + 2 * MARGIN) * SCALE
        self.h = (ymax - ymin + 2 * MARGIN) * SCALE
        self.parts: list[str] = []

    def pt(self, p) -> tuple[float, float]:
        return ((p[0] - self.xmin) * SCALE, (self.ymax - p[1]) * SCALE)

    def path(self, rings, fill, stroke="black", width=2.0) -> None:
        ds = []
        for ring in rings:
            pts = [self.pt(p) for p in ring]
            d = "M " + " L ".join(f"{x:.1f} {y:.1f}" for x, y in pts) + " Z"
            ds.append(d)
        self.parts.append(f'<path d="{" ".join(ds)}" fill="{fill}" stroke="{stroke}" '
                          f'stroke-width="{width}" fill-rule="evenodd"/>')

    def line(self, a, b, stroke, width=1.5, dash: str | None = None) -> None:
        (x1, y1), (x2, y2) = self.pt(a), self.pt(b)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
                          f'stroke="{stroke}" stroke-width="{width}"{extra}/>')

    def circle(self, p, r, fill, stroke="black", width=1.5) -> None:
        x, y = self.pt(p)
        self.parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{r:.1f}" '
                          f'fill="{fill}" stroke="{stroke}" stroke-width="{width}"/>')

    def svg(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w:.0f}" '
                f'height="{self.h:.0f}" viewBox="0 0 {self.w:.0f} {self.h:.0f}">')
        bg = f'<rect width="{self.w:.0f}" height="{self.h:.0f}" fill="#3a3a3a"/>'
        return "\n".join([head, bg] + self.parts + ["</svg>"])


def render_svg(env: Environment,
               solution: Solution | None = None,
               web: Web | None = None,
               graph_data: dict | None = None) -> str:
    """Compose an SVG of the environment and any of the given overlays."""
    cv = _Canvas(env)
    cv.path([env.outer] + env.holes, fill="white")

    if graph_data is not None:
        _draw_graph(cv, graph_data)
    if web is not None:
        _draw_web(cv, web)
    if solution is not None:
        _draw_solution(cv, solution)
    return cv.svg()


def _draw_solution(cv: _Canvas, sol: Solution) -> None:
    for i in range(sol.n):
        color = PURSUER_COLORS[i % len(PURSUER_COLORS)]
        track = [w[i] for w in sol.waypoints]
        for a, b in zip(track, track[1:]):
            cv.line(a, b, color, width=3.0)
        cv.circle(track[0], 7.0, fill=color)            # initial: filled
        cv.circle(track[-1], 7.0, fill="none", stroke=color, width=3.0)  # final: hollow


def _draw_web(cv: _Canvas, web: Web) -> None:
    for q, (i, j) in zip(web.intersection_points, web.pairs):
        cv.line(q, web.initial_points[i], "#2ca02c", width=1.2)
        cv.line(q, web.initial_points[j], "#2ca02c", width=1.2)
    for p in web.initial_points:
        cv.circle(p, 5.0, fill="red")
    for q in web.intersection_points:
        cv.circle(q, 4.0, fill="blue")


def _draw_graph(cv: _Canvas, data: dict) -> None:
    n = data.get("num_pursuers", 1)
    verts = {v["id"]: v["config"] for v in data["vertices"]}
    for a, b in data["edges"]:
        ca, cb = verts[a], verts[b]
        for i in range(n):
            color = PURSUER_COLORS[i % len(PURSUER_COLORS)]
            cv.line(ca[i], cb[i], color, width=0.8, dash="3,3")
    for cfg in verts.values():
        for i in range(n):
            cv.circle(cfg[i], 2.5, fill="#555555", stroke="none", width=0)
