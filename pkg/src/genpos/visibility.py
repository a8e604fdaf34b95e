"""Who sees whom when point robots block sightlines.

A robot r_j is visible from r_i iff no third robot lies on the open
segment between them.  Everything in here takes the true global
configuration; the simulator owns it, individual robots only ever get
the per-robot snapshot derived from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .geom import (
    DEFAULT_TOL,
    TWO_PI,
    Direction,
    Hull,
    Orientation,
    Point2,
    Tolerance,
    convex_hull,
    dist,
    orientation,
)


@dataclass(frozen=True)
class Configuration:
    """Positions of all robots at one instant; indices are robot ids."""

    positions: tuple[Point2, ...]

    def __post_init__(self) -> None:
        if not self.positions:
            raise ValueError("empty configuration")
        object.__setattr__(
            self, "positions", tuple(Point2(float(p[0]), float(p[1])) for p in self.positions)
        )

    @property
    def n(self) -> int:
        return len(self.positions)

    def validate_distinct(self) -> None:
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                if dist(self.positions[i], self.positions[j]) == 0.0:
                    raise ValueError(f"robots {i} and {j} coincide")


class RobotClass(Enum):
    HULL_VERTEX = "EV"  # never moves, obstructs nobody
    HULL_EDGE = "EE"    # sits on a hull edge between other robots
    INTERIOR = "I"


@dataclass(frozen=True)
class VisibilityView:
    """One robot's visible set, sorted by angle around the observer."""

    observer: int
    visible: tuple[int, ...]
    directions: tuple[Direction, ...]


def _blocks(p: Point2, q: Point2, r: Point2, tol: Tolerance) -> bool:
    """True when r obstructs the sightline p-q.

    Two ways to obstruct: sit on the open segment (collinear per the cross
    test and strictly between by projection), or sit within eps_ang of the
    sightline direction as seen from either endpoint while being nearer
    than the other endpoint.  The angular clause keeps visibility
    consistent with direction bookkeeping: two visible robots never share
    a direction, the nearer one always wins.
    """
    if orientation(p, q, r, tol) is Orientation.COLLINEAR:
        dx = q[0] - p[0]
        dy = q[1] - p[1]
        denom = dx * dx + dy * dy
        if denom == 0.0:
            return False
        t = ((r[0] - p[0]) * dx + (r[1] - p[1]) * dy) / denom
        if tol.eps_col < t < 1.0 - tol.eps_col:
            return True
    return _angle_blocks(p, q, r, tol) or _angle_blocks(q, p, r, tol)


def _angle_blocks(p: Point2, q: Point2, r: Point2, tol: Tolerance) -> bool:
    """r lies within eps_ang of the direction p->q, ahead of p, nearer than q."""
    jx = q[0] - p[0]
    jy = q[1] - p[1]
    kx = r[0] - p[0]
    ky = r[1] - p[1]
    d2_pq = jx * jx + jy * jy
    d2_pr = kx * kx + ky * ky
    if d2_pr >= d2_pq:
        return False
    dot = jx * kx + jy * ky
    if dot <= 0.0:
        return False
    cross = jx * ky - jy * kx
    return abs(cross) <= tol.eps_ang * math.sqrt(d2_pq * d2_pr)


def visible_set(cfg: Configuration, i: int, tol: Tolerance = DEFAULT_TOL) -> VisibilityView:
    """Robots visible from robot i, in increasing angular order."""
    pts = cfg.positions
    p = pts[i]
    vis = []
    for j in range(cfg.n):
        if j == i:
            continue
        q = pts[j]
        if any(k != i and k != j and _blocks(p, q, pts[k], tol) for k in range(cfg.n)):
            continue
        vis.append(j)
    vis.sort(key=lambda j: Direction.towards(p, pts[j]).angle)
    return VisibilityView(
        observer=i,
        visible=tuple(vis),
        directions=tuple(Direction.towards(p, pts[j]) for j in vis),
    )


def star_order(view: VisibilityView) -> list[tuple[int, int]]:
    """Cyclic consecutive pairs of the view; degenerate self-pair for one robot."""
    ids = view.visible
    if not ids:
        raise ValueError("star_order needs at least one visible robot")
    k = len(ids)
    return [(ids[t], ids[(t + 1) % k]) for t in range(k)]


def blocked_by(cfg: Configuration, i: int, tol: Tolerance = DEFAULT_TOL) -> frozenset[int]:
    """Robots whose pairwise sightline robot i sits on (i strictly between them)."""
    pts = cfg.positions
    out = set()
    for j in range(cfg.n):
        if j == i:
            continue
        for k in range(j + 1, cfg.n):
            if k == i:
                continue
            if _blocks(pts[j], pts[k], pts[i], tol):
                out.add(j)
                out.add(k)
    return frozenset(out)


def classify(cfg: Configuration, i: int, tol: Tolerance = DEFAULT_TOL) -> RobotClass:
    """Hull-based class: vertex robots never move, edge robots always block."""
    hull = convex_hull(list(cfg.positions), tol)
    return _class_from_hull(hull, i)


def _class_from_hull(hull: Hull, i: int) -> RobotClass:
    if i in hull.on_edge:
        return RobotClass.HULL_EDGE
    if i in hull.interior:
        return RobotClass.INTERIOR
    return RobotClass.HULL_VERTEX


def classify_by_view(cfg: Configuration, i: int, tol: Tolerance = DEFAULT_TOL) -> RobotClass:
    """Local-information classification used as a cross-check.

    A robot is outside the polygon of its visible neighbors iff some
    angular gap exceeds pi, and on its boundary iff the widest gap equals
    pi.  With fewer than three visible robots the polygon is degenerate
    and the hull answer is used directly.
    """
    view = visible_set(cfg, i, tol)
    if len(view.visible) <= 2:
        return classify(cfg, i, tol)
    angles = [d.angle for d in view.directions]
    widest = angles[0] + TWO_PI - angles[-1]
    for a, b in zip(angles, angles[1:]):
        widest = max(widest, b - a)
    if widest > math.pi + tol.eps_ang:
        return RobotClass.HULL_VERTEX
    if widest >= math.pi - tol.eps_ang:
        return RobotClass.HULL_EDGE
    return RobotClass.INTERIOR


def collinear_triples(cfg: Configuration, tol: Tolerance = DEFAULT_TOL) -> list[tuple[int, int, int]]:
    """All unordered collinear triples; empty iff the robots are in general position."""
    pts = cfg.positions
    n = cfg.n
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                if orientation(pts[i], pts[j], pts[k], tol) is Orientation.COLLINEAR:
                    out.append((i, j, k))
    return out


@dataclass(frozen=True)
class SceneAnalysis:
    """Everything the simulator needs about one instant, computed in one pass."""

    cfg: Configuration
    views: tuple[VisibilityView, ...]
    blocked: tuple[frozenset[int], ...]
    classes: tuple[RobotClass, ...]
    triples: tuple[tuple[int, int, int], ...]
    hull: Hull

    @property
    def sum_visible(self) -> int:
        return sum(len(v.visible) for v in self.views)

    def visible_sets(self) -> list[frozenset[int]]:
        return [frozenset(v.visible) for v in self.views]


def analyze(cfg: Configuration, tol: Tolerance = DEFAULT_TOL) -> SceneAnalysis:
    """Batch equivalent of the per-robot operations above.

    One sweep over unordered triples finds every collinearity, derives the
    blocked sightline pairs and the obstruction sets, then views and hull
    classes follow.  Output matches the per-robot functions exactly.
    """
    pts = cfg.positions
    n = cfg.n
    eps = tol.eps_col
    gate = max(tol.eps_col, tol.eps_ang)
    triples: list[tuple[int, int, int]] = []
    blocked_pair = [[False] * n for _ in range(n)]
    blockers: list[set[int]] = [set() for _ in range(n)]

    for i in range(n):
        px, py = pts[i]
        for j in range(i + 1, n):
            qx, qy = pts[j]
            for k in range(j + 1, n):
                rx, ry = pts[k]
                cross = (qx - px) * (ry - py) - (qy - py) * (rx - px)
                s2 = max(
                    (qx - px) ** 2 + (qy - py) ** 2,
                    (rx - px) ** 2 + (ry - py) ** 2,
                    (rx - qx) ** 2 + (ry - qy) ** 2,
                )
                if abs(cross) > gate * s2:
                    continue
                if abs(cross) <= eps * s2:
                    triples.append((i, j, k))
                    # which of the three is strictly between the other two?
                    for mid, a, b in ((i, j, k), (j, i, k), (k, i, j)):
                        dx = pts[b][0] - pts[a][0]
                        dy = pts[b][1] - pts[a][1]
                        denom = dx * dx + dy * dy
                        if denom == 0.0:
                            continue
                        t = (
                            (pts[mid][0] - pts[a][0]) * dx
                            + (pts[mid][1] - pts[a][1]) * dy
                        ) / denom
                        if eps < t < 1.0 - eps:
                            blocked_pair[a][b] = blocked_pair[b][a] = True
                            blockers[mid].add(a)
                            blockers[mid].add(b)
                            break
                # near-aligned robots: the nearer hides the farther even
                # when the cross test does not call the triple collinear
                for c, a, b in ((k, i, j), (j, i, k), (i, j, k)):
                    if not blocked_pair[a][b] and (
                        _angle_blocks(pts[a], pts[b], pts[c], tol)
                        or _angle_blocks(pts[b], pts[a], pts[c], tol)
                    ):
                        blocked_pair[a][b] = blocked_pair[b][a] = True
                        blockers[c].add(a)
                        blockers[c].add(b)

    views = []
    for i in range(n):
        vis = [j for j in range(n) if j != i and not blocked_pair[i][j]]
        vis.sort(key=lambda j: Direction.towards(pts[i], pts[j]).angle)
        views.append(
            VisibilityView(
                observer=i,
                visible=tuple(vis),
                directions=tuple(Direction.towards(pts[i], pts[j]) for j in vis),
            )
        )

    hull = convex_hull(list(pts), tol)
    classes = tuple(_class_from_hull(hull, i) for i in range(n))
    return SceneAnalysis(
        cfg=cfg,
        views=tuple(views),
        blocked=tuple(frozenset(b) for b in blockers),
        classes=classes,
        triples=tuple(triples),
        hull=hull,
    )
