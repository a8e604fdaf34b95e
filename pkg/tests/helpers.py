"""Shared builders for the test suite."""

from __future__ import annotations

import math
import random

from genpos.geom import Point2
from genpos.visibility import Configuration

SQUARE_CENTER = Configuration(
    (
        Point2(-1.0, -1.0),
        Point2(1.0, -1.0),
        Point2(1.0, 1.0),
        Point2(-1.0, 1.0),
        Point2(0.0, 0.0),
    )
)

LINE3 = Configuration((Point2(0, 0), Point2(1, 0), Point2(2, 0)))
LINE4 = Configuration((Point2(0, 0), Point2(1, 0), Point2(2, 0), Point2(3, 0)))

EQUILATERAL = Configuration(
    (Point2(0.0, 0.0), Point2(1.0, 0.0), Point2(0.5, math.sqrt(3.0) / 2.0))
)


def random_config(rng: random.Random, n: int, planted: int = 0) -> Configuration:
    """Random point cloud with `planted` robots placed exactly on sightlines."""
    planted = min(planted, max(0, n - 2))
    pts: list[Point2] = []

    def ok(p: Point2, sep: float) -> bool:
        return all((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 >= sep * sep for q in pts)

    while len(pts) < n - planted:
        p = Point2(rng.uniform(0, 10), rng.uniform(0, 10))
        if ok(p, 0.2):
            pts.append(p)
    while len(pts) < n:
        a, b = rng.sample(range(len(pts)), 2)
        t = rng.uniform(0.25, 0.75)
        p = Point2(
            pts[a][0] + t * (pts[b][0] - pts[a][0]),
            pts[a][1] + t * (pts[b][1] - pts[a][1]),
        )
        if ok(p, 0.05):
            pts.append(p)
    return Configuration(tuple(pts))
