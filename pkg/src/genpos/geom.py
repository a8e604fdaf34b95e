"""Tolerance-aware planar primitives.

Everything here works on plain floats and is pure: orientation tests,
angular-gap bookkeeping around a vertex, gap bisectors, ray/line
intersection and a classifying convex hull.  Angles are radians
throughout; coordinates are dimensionless scenario units.

Predicates use relative tolerances (see `Tolerance`) because destinations
produced by the movement rule sit on angle bisectors and therefore have
irrational coordinates; exact rational arithmetic would not survive a
single move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

TWO_PI = 2.0 * math.pi


class Point2(NamedTuple):
    x: float
    y: float


def norm_angle(a: float) -> float:
    """Wrap an angle into [0, 2*pi)."""
    a = math.fmod(a, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI:  # fmod can round up to 2*pi for tiny negatives
        a = 0.0
    return a


def dist(p: Point2, q: Point2) -> float:
    return math.hypot(q[0] - p[0], q[1] - p[1])


@dataclass(frozen=True)
class Direction:
    """An angle normalized into [0, 2*pi)."""

    angle: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle", norm_angle(self.angle))

    @staticmethod
    def towards(src: Point2, dst: Point2) -> "Direction":
        return Direction(math.atan2(dst[1] - src[1], dst[0] - src[0]))

    def unit(self) -> Point2:
        return Point2(math.cos(self.angle), math.sin(self.angle))


@dataclass(frozen=True)
class AngularGap:
    """A cyclic angular interval [start, start + extent) around a vertex."""

    start: Direction
    extent: float  # radians, in (0, 2*pi]

    def bisector_angle(self) -> float:
        return norm_angle(self.start.angle + 0.5 * self.extent)

    def contains_angle(self, a: float) -> bool:
        off = norm_angle(a - self.start.angle)
        return 0.0 < off < self.extent


@dataclass(frozen=True)
class Ray:
    origin: Point2
    dir: Direction

    def point_at(self, t: float) -> Point2:
        u = self.dir.unit()
        return Point2(self.origin[0] + t * u[0], self.origin[1] + t * u[1])


@dataclass(frozen=True)
class Tolerance:
    """Relative tolerances shared by all predicates.

    eps_col scales with the square of the local size (it bounds a cross
    product); eps_ang is an absolute angular slack in radians.
    """

    eps_col: float = 1e-12
    eps_ang: float = 1e-10

    def __post_init__(self) -> None:
        if not (0.0 < self.eps_col < 1e-3):
            raise ValueError(f"eps_col out of range: {self.eps_col}")
        if not (0.0 < self.eps_ang < 1e-3):
            raise ValueError(f"eps_ang out of range: {self.eps_ang}")


DEFAULT_TOL = Tolerance()


class Orientation(Enum):
    LEFT = 1
    COLLINEAR = 0
    RIGHT = -1


class DuplicateDirection(ValueError):
    """Two directions around one vertex coincide within tolerance."""


class RayHit(NamedTuple):
    point: Point2
    distance: float


class _RaySentinel:
    __slots__ = ("_name",)

    def __init__(self, name: str) -> None:
        self._name = name

    def __repr__(self) -> str:
        return self._name


#: Ray is parallel to the line and its origin is off the line.
PARALLEL_NO_HIT = _RaySentinel("PARALLEL_NO_HIT")
#: The intersection is at (or within tolerance of) the ray origin.
ORIGIN_INCIDENT = _RaySentinel("ORIGIN_INCIDENT")


def orientation(p: Point2, q: Point2, r: Point2, tol: Tolerance = DEFAULT_TOL) -> Orientation:
    """Side of r relative to the directed line p -> q.

    Collinear iff |cross| <= eps_col * s^2 where s is the largest pairwise
    distance of the triple, which makes the verdict scale-invariant.
    Degenerate triples with coincident points report Collinear.
    """
    px, py = p
    qx, qy = q
    rx, ry = r
    cross = (qx - px) * (ry - py) - (qy - py) * (rx - px)
    s2 = max(
        (qx - px) ** 2 + (qy - py) ** 2,
        (rx - px) ** 2 + (ry - py) ** 2,
        (rx - qx) ** 2 + (ry - qy) ** 2,
    )
    if abs(cross) <= tol.eps_col * s2:
        return Orientation.COLLINEAR
    return Orientation.LEFT if cross > 0.0 else Orientation.RIGHT


def cyclic_gaps(dirs: list[Direction], tol: Tolerance = DEFAULT_TOL) -> list[AngularGap]:
    """Angular gaps between consecutive directions around one vertex.

    The gaps close cyclically and their extents sum to 2*pi.  A single
    direction yields one full-turn gap.  Two directions equal within
    eps_ang raise DuplicateDirection: around a robot this would mean a
    blocked robot was wrongly reported visible.
    """
    if not dirs:
        raise ValueError("cyclic_gaps needs at least one direction")
    if len(dirs) == 1:
        return [AngularGap(dirs[0], TWO_PI)]
    angles = sorted(d.angle for d in dirs)
    for a, b in zip(angles, angles[1:]):
        if b - a <= tol.eps_ang:
            raise DuplicateDirection(f"directions {a} and {b} coincide")
    if angles[0] + TWO_PI - angles[-1] <= tol.eps_ang:
        raise DuplicateDirection(f"directions {angles[-1]} and {angles[0]} coincide")
    gaps = []
    for a, b in zip(angles, angles[1:]):
        gaps.append(AngularGap(Direction(a), b - a))
    gaps.append(AngularGap(Direction(angles[-1]), angles[0] + TWO_PI - angles[-1]))
    return gaps


def bisector_of_gap(origin: Point2, gap: AngularGap) -> Ray:
    """Ray from origin splitting the gap in half."""
    return Ray(origin, Direction(gap.bisector_angle()))


def ray_line_intersection(
    ray: Ray, a: Point2, b: Point2, tol: Tolerance = DEFAULT_TOL
):
    """Intersect a ray with the infinite line through a and b.

    Returns a RayHit for a forward intersection, None when the line
    crosses only the backward extension of the ray, ORIGIN_INCIDENT when
    the intersection lies within eps_col*scale of the ray origin (the
    origin sits on the line), and PARALLEL_NO_HIT when ray and line are
    parallel with the origin off the line.
    """
    ox, oy = ray.origin
    ux, uy = ray.dir.unit()
    vx = b[0] - a[0]
    vy = b[1] - a[1]
    vlen = math.hypot(vx, vy)
    if vlen == 0.0:
        raise ValueError("degenerate line: a == b")
    scale = max(vlen, math.hypot(a[0] - ox, a[1] - oy), math.hypot(b[0] - ox, b[1] - oy))
    denom = ux * vy - uy * vx
    if abs(denom) <= tol.eps_ang * vlen:
        if orientation(a, b, ray.origin, tol) is Orientation.COLLINEAR:
            return ORIGIN_INCIDENT
        return PARALLEL_NO_HIT
    t = ((a[0] - ox) * vy - (a[1] - oy) * vx) / denom
    if abs(t) <= tol.eps_col * scale:
        return ORIGIN_INCIDENT
    if t < 0.0:
        return None
    return RayHit(Point2(ox + t * ux, oy + t * uy), t)


def angle_at(vertex: Point2, a: Point2, b: Point2) -> float:
    """Unsigned angle between vectors a-vertex and b-vertex, in [0, pi]."""
    ux = a[0] - vertex[0]
    uy = a[1] - vertex[1]
    wx = b[0] - vertex[0]
    wy = b[1] - vertex[1]
    if (ux == 0.0 and uy == 0.0) or (wx == 0.0 and wy == 0.0):
        raise ValueError("angle_at: endpoint coincides with vertex")
    cross = ux * wy - uy * wx
    dot = ux * wx + uy * wy
    return math.atan2(abs(cross), dot)


@dataclass(frozen=True)
class Hull:
    """Convex hull with every input point classified.

    vertices are in counterclockwise order.  on_edge / interior index the
    input list; the remaining indices are the hull vertices themselves
    (in vertex order).  Collinear boundary points are never vertices.
    """

    vertices: tuple[Point2, ...]
    vertex_indices: tuple[int, ...]
    on_edge: frozenset[int]
    interior: frozenset[int]


def _between_by_projection(p: Point2, q: Point2, r: Point2, eps: float) -> bool:
    """True when r projects strictly inside segment p-q (r assumed near the line)."""
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    denom = dx * dx + dy * dy
    if denom == 0.0:
        return False
    t = ((r[0] - p[0]) * dx + (r[1] - p[1]) * dy) / denom
    return eps < t < 1.0 - eps


def convex_hull(pts: list[Point2], tol: Tolerance = DEFAULT_TOL) -> Hull:
    """Monotone-chain hull; points on hull edges are classified, not vertices.

    A fully collinear input yields the two extreme points as the only
    vertices and everything else on_edge.
    """
    n = len(pts)
    if n == 0:
        raise ValueError("convex_hull needs at least one point")
    if n == 1:
        return Hull((pts[0],), (0,), frozenset(), frozenset())

    order = sorted(range(n), key=lambda i: (pts[i][0], pts[i][1]))

    def chain(indices):
        out: list[int] = []
        for i in indices:
            while len(out) >= 2 and orientation(pts[out[-2]], pts[out[-1]], pts[i], tol) is not Orientation.LEFT:
                out.pop()
            out.append(i)
        return out

    lower = chain(order)
    upper = chain(reversed(order))
    vertex_idx = lower[:-1] + upper[:-1]
    if len(vertex_idx) < 2:  # all points coincide-ish; keep extremes
        vertex_idx = [order[0], order[-1]]
    vset = set(vertex_idx)

    on_edge = set()
    interior = set()
    verts = [pts[i] for i in vertex_idx]
    m = len(verts)
    for i in range(n):
        if i in vset:
            continue
        p = pts[i]
        edge_hit = False
        for k in range(m):
            a = verts[k]
            b = verts[(k + 1) % m] if m > 2 else verts[1]
            if a == b:
                continue
            if orientation(a, b, p, tol) is Orientation.COLLINEAR and _between_by_projection(
                a, b, p, tol.eps_col
            ):
                edge_hit = True
                break
            if m == 2:
                break
        if edge_hit:
            on_edge.add(i)
        else:
            interior.add(i)
    return Hull(tuple(verts), tuple(vertex_idx), frozenset(on_edge), frozenset(interior))


def hull_margin(vertices: tuple[Point2, ...], p: Point2) -> float:
    """Signed slack of p against a CCW hull: >= 0 inside-or-on, < 0 outside.

    For degenerate one- or two-vertex hulls the margin is minus the
    distance to the vertex / segment.
    """
    m = len(vertices)
    if m == 1:
        return -dist(vertices[0], p)
    if m == 2:
        a, b = vertices
        dx = b[0] - a[0]
        dy = b[1] - a[1]
        L2 = dx * dx + dy * dy
        t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / L2
        t = min(1.0, max(0.0, t))
        return -math.hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy)
    worst = math.inf
    for k in range(m):
        a = vertices[k]
        b = vertices[(k + 1) % m]
        elen = dist(a, b)
        if elen == 0.0:
            continue
        cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        worst = min(worst, cross / elen)
    return worst


@dataclass(frozen=True)
class Frame:
    """Rigid transform between the global frame and one robot's local frame.

    Local axes are the global axes rotated by `angle`; `reflect` flips the
    local y axis (robots share no chirality).  Fixed once per robot.
    """

    origin: Point2 = Point2(0.0, 0.0)
    angle: float = 0.0
    reflect: bool = False

    def to_local(self, p: Point2) -> Point2:
        c = math.cos(self.angle)
        s = math.sin(self.angle)
        vx = p[0] - self.origin[0]
        vy = p[1] - self.origin[1]
        x = c * vx + s * vy
        y = -s * vx + c * vy
        return Point2(x, -y if self.reflect else y)

    def to_global(self, q: Point2) -> Point2:
        c = math.cos(self.angle)
        s = math.sin(self.angle)
        qy = -q[1] if self.reflect else q[1]
        return Point2(
            c * q[0] - s * qy + self.origin[0],
            s * q[0] + c * qy + self.origin[1],
        )


IDENTITY_FRAME = Frame()
