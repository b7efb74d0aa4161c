"""Joint motion strategies and their on-disk format."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .shadows import JointConfig


@dataclass
class Solution:
    """A polyline of joint configurations, first waypoint at the root."""

    n: int
    waypoints: list[JointConfig]

    def __post_init__(self):
        for w in self.waypoints:
            if len(w) != self.n:
                raise ValueError(f"waypoint has {len(w)} positions for {self.n} pursuers")

    def length(self) -> float:
        """Path length in the joint Euclidean metric on E^n."""
        total = 0.0
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            total += math.sqrt(sum((pb[0] - pa[0]) ** 2 + (pb[1] - pa[1]) ** 2
                                   for pa, pb in zip(a, b)))
        return total

    def to_json(self, path: str) -> None:
        data = {"num_pursuers": self.n,
                "waypoints": [[[p[0], p[1]] for p in w] for w in self.waypoints]}
        with open(path, "w") as f:
            json.dump(data, f, indent=1)

    @classmethod
    def from_json(cls, path: str) -> "Solution":
        with open(path) as f:
            data = json.load(f)
        waypoints = [tuple((float(x), float(y)) for x, y in w) for w in data["waypoints"]]
        return cls(int(data["num_pursuers"]), waypoints)


def joint_distance(a: JointConfig, b: JointConfig) -> float:
    """Euclidean distance in E^n."""
    return math.sqrt(sum((pb[0] - pa[0]) ** 2 + (pb[1] - pa[1]) ** 2
                         for pa, pb in zip(a, b)))
