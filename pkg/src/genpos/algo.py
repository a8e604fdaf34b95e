"""The robot-local movement rule.

Given only a snapshot of the robots it can see (plus the total count n,
which every robot knows), an eligible robot picks the widest usable
angular gap around itself, walks a short step along that gap's bisector,
and thereby breaks every collinearity it participates in without ever
crossing a sightline of two robots it can see.

Quantities per decision:

* gaps            - angular gaps between consecutive visible robots
* neighbor_angles - angles subtended at each visible robot between this
                    robot and that robot's own adjacent visible robots
* min_angle       - minimum over gaps and neighbor_angles (0 for an
                    all-collinear view)
* disp_cap        - min_angle / n^2: cap on how far any observer sees
                    this robot swing during the move
* clearance       - distance along the chosen bisector to the nearest
                    sightline of two visible robots (inf if none)
* nearest         - distance to the nearest visible robot
* step            - min(clearance / n^2, nearest * sin(disp_cap)), or
                    `nearest` itself for an all-collinear view
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geom import (
    DEFAULT_TOL,
    AngularGap,
    Direction,
    Frame,
    Point2,
    Ray,
    RayHit,
    Tolerance,
    bisector_of_gap,
    cyclic_gaps,
    dist,
    angle_at,
    ray_line_intersection,
)
from .visibility import RobotClass

NeighborViews = tuple[tuple[Point2, ...], ...]


class NotEligible(RuntimeError):
    """The snapshot belongs to a robot that must not move (hull vertex)."""


class DegenerateView(RuntimeError):
    """Fewer than two visible robots; the movement rule is undefined."""


class NoEligibleGap(RuntimeError):
    """Only the full-turn gap exists (single visible robot)."""


class SelfNotInNeighborView(RuntimeError):
    """A neighbor's view does not contain this robot; symmetry is broken."""


@dataclass(frozen=True)
class Snapshot:
    """What one robot perceives at its Look: everything in its own frame.

    neighbor_views holds, per visible robot, that robot's own visible set
    (positions, this robot included) sorted by angle around it.  Robots
    cannot derive this from their own sensing in general; the simulator
    supplies the ground truth at Look time.
    """

    self_pos: Point2
    seen: tuple[Point2, ...]
    n: int
    frame: Frame
    neighbor_views: NeighborViews | None = None


@dataclass(frozen=True)
class LocalQuantities:
    gaps: tuple[AngularGap, ...]
    neighbor_angles: tuple[float, ...]
    chosen_gap: float
    bisector: Ray
    min_angle: float
    disp_cap: float
    clearance: float  # may be math.inf
    nearest: float
    step: float
    destination: Point2  # local frame
    collinear_view: bool


@dataclass(frozen=True)
class MoveDecision:
    destination: Point2  # global frame
    quantities: LocalQuantities


def view_gaps(snap: Snapshot, tol: Tolerance = DEFAULT_TOL) -> list[AngularGap]:
    """Angular gaps between consecutive visible robots around the snapshot owner."""
    if not snap.seen:
        raise DegenerateView("no visible robots")
    dirs = [Direction.towards(snap.self_pos, p) for p in snap.seen]
    return cyclic_gaps(dirs, tol)


def neighbor_view_angles(
    snap: Snapshot, neighbor_views: NeighborViews
) -> list[float]:
    """Angles at each visible robot between self and its adjacent visible robots.

    A visible robot that sees only the snapshot owner contributes nothing.
    Both cyclic neighbors are taken, so a two-member view contributes the
    same angle twice.
    """
    out: list[float] = []
    sx, sy = snap.self_pos
    for k, rj in enumerate(snap.seen):
        members = neighbor_views[k]
        if len(members) < 2:
            continue
        best = -1
        best_d2 = math.inf
        for idx, m in enumerate(members):
            d2 = (m[0] - sx) ** 2 + (m[1] - sy) ** 2
            if d2 < best_d2:
                best_d2 = d2
                best = idx
        ref = max(dist(snap.self_pos, rj), 1.0e-30)
        if best < 0 or math.sqrt(best_d2) > 1e-9 * ref:
            raise SelfNotInNeighborView(f"neighbor view {k} lacks the observer")
        prev = members[best - 1]
        nxt = members[(best + 1) % len(members)]
        out.append(angle_at(rj, prev, snap.self_pos))
        out.append(angle_at(rj, snap.self_pos, nxt))
    return out


def select_gap(
    self_pos: Point2, gaps: list[AngularGap], tol: Tolerance = DEFAULT_TOL
) -> tuple[float, Ray]:
    """Pick the gap to move into and return (extent, bisector ray).

    The widest gap is used if it is strictly narrower than pi; otherwise
    the second-widest (counting multiplicity) is used.  Ties are broken by
    the smallest start angle in the snapshot's own frame, so the choice is
    deterministic per robot but carries no shared orientation.
    """
    if len(gaps) == 1:
        raise NoEligibleGap("single visible robot leaves only the full-turn gap")
    extents = sorted((g.extent for g in gaps), reverse=True)
    target = extents[0] if extents[0] < math.pi - tol.eps_ang else extents[1]
    candidates = [g for g in gaps if abs(g.extent - target) <= tol.eps_ang]
    chosen = min(candidates, key=lambda g: g.start.angle)
    return chosen.extent, bisector_of_gap(self_pos, chosen)


def min_separation(
    gaps: list[AngularGap],
    neighbor_angles: list[float],
    n: int,
    tol: Tolerance = DEFAULT_TOL,
) -> tuple[float, float, bool]:
    """(min_angle, disp_cap, collinear_view) for one snapshot.

    The view is collinear when every gap is a straight angle and every
    neighbor angle is flat (0 or pi); the minimum is then reported as 0
    and the cap is meaningless.
    """
    if not gaps:
        raise DegenerateView("no gaps")
    flat_gaps = all(abs(g.extent - math.pi) <= tol.eps_ang for g in gaps)
    flat_neighbors = all(
        a <= tol.eps_ang or math.pi - a <= tol.eps_ang for a in neighbor_angles
    )
    if flat_gaps and flat_neighbors:
        return 0.0, 0.0, True
    m = min(g.extent for g in gaps)
    if neighbor_angles:
        m = min(m, min(neighbor_angles))
    return m, m / (n * n), False


def intersect_distance(snap: Snapshot, bisector: Ray, tol: Tolerance = DEFAULT_TOL) -> float:
    """Distance along the bisector to the nearest sightline of two visible robots.

    Sightlines through the robot itself and parallel misses are ignored;
    inf when nothing ahead.
    """
    if len(snap.seen) < 2:
        raise DegenerateView("need two visible robots for a sightline")
    best = math.inf
    seen = snap.seen
    for j in range(len(seen)):
        for k in range(j + 1, len(seen)):
            hit = ray_line_intersection(bisector, seen[j], seen[k], tol)
            if isinstance(hit, RayHit) and hit.distance < best:
                best = hit.distance
    return best


def nearest_distance(snap: Snapshot) -> float:
    if not snap.seen:
        raise DegenerateView("no visible robots")
    return min(dist(snap.self_pos, p) for p in snap.seen)


def is_eligible(snap: Snapshot, cls: RobotClass, has_blocked: bool) -> bool:
    """Movement guard: hull-edge robots, and interior robots that block someone.

    Hull vertices never move.  A robot seeing fewer than two others can
    never be an eligible blocker.
    """
    if len(snap.seen) < 2:
        return False
    if cls is RobotClass.HULL_EDGE:
        return True
    return cls is RobotClass.INTERIOR and has_blocked


def compute_destination(
    snap: Snapshot,
    neighbor_views: NeighborViews | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> MoveDecision:
    """Full movement rule for one eligible robot.

    With a non-collinear view the step is min(clearance/n^2,
    nearest*sin(disp_cap)): short enough never to reach a visible
    sightline and never to swing more than disp_cap in any observer's
    eyes.  With an all-collinear view the robot steps a full
    nearest-robot distance along the perpendicular bisector.
    """
    if len(snap.seen) < 2:
        raise DegenerateView(f"{len(snap.seen)} visible robot(s)")
    nv = neighbor_views if neighbor_views is not None else snap.neighbor_views
    if nv is None:
        raise ValueError("neighbor views are required")

    gaps = view_gaps(snap, tol)
    if max(g.extent for g in gaps) > math.pi + tol.eps_ang:
        raise NotEligible("view spans less than a half-plane: hull vertex")

    nangles = neighbor_view_angles(snap, nv)
    min_angle, disp_cap, collinear_view = min_separation(gaps, nangles, snap.n, tol)
    chosen, bis = select_gap(snap.self_pos, gaps, tol)
    nearest = nearest_distance(snap)
    clearance = intersect_distance(snap, bis, tol)

    if collinear_view:
        step = nearest
    else:
        step = min(clearance / (snap.n * snap.n), nearest * math.sin(disp_cap))

    ux, uy = bis.dir.unit()
    dest_local = Point2(snap.self_pos[0] + step * ux, snap.self_pos[1] + step * uy)
    quantities = LocalQuantities(
        gaps=tuple(gaps),
        neighbor_angles=tuple(nangles),
        chosen_gap=chosen,
        bisector=bis,
        min_angle=min_angle,
        disp_cap=disp_cap,
        clearance=clearance,
        nearest=nearest,
        step=step,
        destination=dest_local,
        collinear_view=collinear_view,
    )
    return MoveDecision(destination=snap.frame.to_global(dest_local), quantities=quantities)
