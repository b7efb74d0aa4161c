"""Built-in test environments.

Three environments with distinct traits: narrow connecting corridors (h),
hard-to-reach double-bent arms (spider), and rooms spread around obstacles
with a complex boundary (office). Coordinates are in meters.
"""
from __future__ import annotations

from shapely import affinity
from shapely.geometry import box
from shapely.geometry.polygon import orient
from shapely.ops import unary_union

from .geometry import Environment


def _build(shell_parts, obstacles=()) -> Environment:
    geom = unary_union(list(shell_parts))
    if obstacles:
        geom = geom.difference(unary_union(list(obstacles)))
    if geom.geom_type != "Polygon":
        raise ValueError("environment parts do not form a single polygon")
    geom = orient(geom, sign=1.0)
    outer = list(geom.exterior.coords)[:-1]
    holes = [list(ring.coords)[:-1] for ring in geom.interiors]
    return Environment(outer, holes)


def h_env() -> Environment:
    """Two tall bars joined by a narrow corridor."""
    return _build([
        box(0, 0, 2, 10),
        box(8, 0, 10, 10),
        box(2, 4.5, 8, 5.5),
    ])


def spider_env() -> Environment:
    """A hub with four arms whose tips hide behind two bends each."""
    arm = unary_union([
        box(4.6, 6, 5.4, 8.2),    # stem (north)
        box(2.8, 7.4, 4.6, 8.2),  # first bend, west
        box(2.8, 6.2, 3.6, 7.4),  # second bend, back south
    ])
    parts = [box(4, 4, 6, 6)]
    for k in range(4):
        parts.append(affinity.rotate(arm, 90 * k, origin=(5, 5)))
    return _build(parts)


def office_env() -> Environment:
    """An open floor cut by two partial walls and two free-standing blocks,
    leaving rooms connected around the obstructions."""
    return _build([box(0, 0, 13, 9)], [
        box(2.5, 2.2, 3.3, 9),    # wall from the top
        box(9.5, 0, 10.3, 6.8),   # wall from the bottom
        box(5.2, 2.2, 7.6, 3.6),  # lower block
        box(5.2, 5.4, 7.6, 6.8),  # upper block
    ])


CORPUS = {
    "h": h_env,
    "spider": spider_env,
    "office": office_env,
}


def names() -> list[str]:
    return sorted(CORPUS)


def get(name: str) -> Environment:
    try:
        return CORPUS[name]()
    except KeyError:
        raise KeyError(f"unknown corpus environment {name!r}; choices: {names()}") from None
