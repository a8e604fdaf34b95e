"""Brute-force references and trace checkers for the motion guarantees.

Every checker is a pure function of (trace events, initial configuration,
tolerance) and can be rerun offline from a JSONL trace.  Checks about
robot positions are evaluated at quiescent instants (no robot mid-move);
motion segments are additionally dense-sampled for transient
collinearities among concurrently moving robots.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

from . import algo
from .geom import (
    DEFAULT_TOL,
    IDENTITY_FRAME,
    Orientation,
    Point2,
    Tolerance,
    angle_at,
    convex_hull,
    dist,
    hull_margin,
    orientation,
)
from .sim import COMPUTE_DONE, LOOK, MOVE_END, MOVE_START, QUIESCENT, TraceEvent
from .visibility import Configuration, SceneAnalysis, analyze, collinear_triples

MIN_ANGLE_LIMIT = math.pi / 3.0


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    violations: tuple[dict, ...]
    info: tuple[dict, ...] = ()

    def to_dict(self) -> dict:
        return {
            "check": self.name,
            "passed": self.passed,
            "violations": list(self.violations),
            "info": list(self.info),
        }


def _report(name: str, violations: list[dict], info: list[dict] | None = None) -> CheckReport:
    return CheckReport(
        name=name,
        passed=not violations,
        violations=tuple(violations),
        info=tuple(info or ()),
    )


def brute_force_visible(cfg: Configuration, i: int, tol: Tolerance = DEFAULT_TOL) -> set[int]:
    """Reference visibility: k blocks (i, j) when it is collinear and nearer
    than j to both ends, or when it hugs the sightline direction within
    eps_ang from either end while being the nearer one.  Independent of the
    projection-based production path."""
    pts = cfg.positions
    out = set()
    for j in range(cfg.n):
        if j == i:
            continue
        dij = dist(pts[i], pts[j])
        blocked = False
        for k in range(cfg.n):
            if k == i or k == j:
                continue
            dik = dist(pts[i], pts[k])
            djk = dist(pts[j], pts[k])
            if (
                orientation(pts[i], pts[j], pts[k], tol) is Orientation.COLLINEAR
                and dik < dij
                and djk < dij
            ):
                blocked = True
                break
            if dik < dij and angle_at(pts[i], pts[j], pts[k]) <= tol.eps_ang:
                blocked = True
                break
            if djk < dij and angle_at(pts[j], pts[i], pts[k]) <= tol.eps_ang:
                blocked = True
                break
        if not blocked:
            out.add(j)
    return out


# -- trace replay -----------------------------------------------------------


@dataclass
class MoveInfo:
    robot: int
    t_look: float
    look_payload: dict
    compute_payload: dict | None
    t_start: float
    start: Point2
    planned: Point2
    stop: Point2   # stop point the adversary chose
    landed: Point2  # where the robot actually was at MoveEnd
    t_end: float


@dataclass
class Timeline:
    """Piecewise-linear trajectory of every robot, rebuilt from a trace."""

    initial: Configuration
    events: list[TraceEvent]
    pieces: list[list[tuple[float, float, Point2, Point2]]] = field(init=False)
    moves: list[MoveInfo] = field(init=False)
    quiescent: list[TraceEvent] = field(init=False)

    def __post_init__(self) -> None:
        n = self.initial.n
        self.pieces = [[] for _ in range(n)]
        self.moves = []
        self.quiescent = [ev for ev in self.events if ev.kind == QUIESCENT]
        open_cycle: dict[int, dict] = {}
        for ev in self.events:
            if ev.kind == LOOK:
                open_cycle[ev.robot] = {"t_look": ev.t, "look": ev.payload, "compute": None}
            elif ev.kind == COMPUTE_DONE:
                cyc = open_cycle.get(ev.robot)
                if cyc is not None:
                    cyc["compute"] = ev.payload
            elif ev.kind == MOVE_START:
                cyc = open_cycle.setdefault(
                    ev.robot, {"t_look": ev.t, "look": {}, "compute": None}
                )
                cyc["t_start"] = ev.t
                cyc["from"] = Point2(*ev.payload["from"])
                cyc["to"] = Point2(*ev.payload["to"])
                cyc["stop"] = Point2(*ev.payload["stop"])
            elif ev.kind == MOVE_END:
                cyc = open_cycle.pop(ev.robot, None)
                if cyc is None or "t_start" not in cyc:
                    continue
                at = Point2(*ev.payload["at"])
                self.pieces[ev.robot].append((cyc["t_start"], ev.t, cyc["from"], at))
                self.moves.append(
                    MoveInfo(
                        robot=ev.robot,
                        t_look=cyc["t_look"],
                        look_payload=cyc["look"],
                        compute_payload=cyc["compute"],
                        t_start=cyc["t_start"],
                        start=cyc["from"],
                        planned=cyc["to"],
                        stop=cyc["stop"],
                        landed=at,
                        t_end=ev.t,
                    )
                )
        for plist in self.pieces:
            plist.sort(key=lambda p: p[0])
        self._starts = [[p[0] for p in plist] for plist in self.pieces]

    def position_at(self, i: int, t: float) -> Point2:
        plist = self.pieces[i]
        if not plist:
            return self.initial.positions[i]
        idx = bisect_right(self._starts[i], t) - 1
        if idx < 0:
            return self.initial.positions[i]
        t0, t1, start, stop = plist[idx]
        if t >= t1:
            return stop
        if t1 == t0:
            return stop
        f = (t - t0) / (t1 - t0)
        return Point2(start[0] + f * (stop[0] - start[0]), start[1] + f * (stop[1] - start[1]))

    def positions_at(self, t: float) -> Configuration:
        return Configuration(tuple(self.position_at(i, t) for i in range(self.initial.n)))


def move_counts_from_trace(events: list[TraceEvent], n: int) -> list[int]:
    counts = [0] * n
    for ev in events:
        if ev.kind == MOVE_END:
            counts[ev.robot] += 1
    return counts


def recorded_min_angles(events: list[TraceEvent]) -> list[tuple[int, float]]:
    return [
        (ev.robot, ev.payload["min_angle"])
        for ev in events
        if ev.kind == COMPUTE_DONE and ev.payload.get("eligible")
    ]


# -- checkers ----------------------------------------------------------------


def check_no_new_collinearity(
    events: list[TraceEvent],
    initial: Configuration,
    tol: Tolerance = DEFAULT_TOL,
    samples_per_move: int = 32,
) -> CheckReport:
    """No collinear triple may ever appear that was absent initially.

    Asserted at every quiescent instant for all triples, and along motion
    segments for triples that were pairwise mutually visible beforehand.
    Transient line crossings involving robots that could not see each
    other are reported as info, not violations.
    """
    tl = Timeline(initial, events)
    initial_triples = set(collinear_triples(initial, tol))
    violations: list[dict] = []
    info: list[dict] = []

    for ev in tl.quiescent:
        cfg = tl.positions_at(ev.t)
        for tri in collinear_triples(cfg, tol):
            if tri not in initial_triples:
                violations.append({"t": ev.t, "triple": list(tri), "where": "quiescent"})

    qtimes = [ev.t for ev in tl.quiescent]
    qvis: dict[float, list[frozenset[int]]] = {}

    def vis_before(t: float) -> list[frozenset[int]] | None:
        idx = bisect_right(qtimes, t) - 1
        if idx < 0:
            return None
        qt = qtimes[idx]
        if qt not in qvis:
            qvis[qt] = analyze(tl.positions_at(qt), tol).visible_sets()
        return qvis[qt]

    n = initial.n
    for mv in tl.moves:
        if mv.t_end <= mv.t_start:
            continue
        ref = vis_before(mv.t_start)
        s = mv.robot
        for step in range(1, samples_per_move + 1):
            t = mv.t_start + (mv.t_end - mv.t_start) * step / (samples_per_move + 1)
            ps = tl.position_at(s, t)
            for a in range(n):
                if a == s:
                    continue
                pa = tl.position_at(a, t)
                for b in range(a + 1, n):
                    if b == s:
                        continue
                    tri = tuple(sorted((s, a, b)))
                    if tri in initial_triples:
                        continue
                    if orientation(pa, tl.position_at(b, t), ps, tol) is Orientation.COLLINEAR:
                        mutual = (
                            ref is not None
                            and a in ref[b]
                            and s in ref[a]
                            and s in ref[b]
                        )
                        entry = {"t": t, "triple": list(tri), "where": "mid-move"}
                        if mutual:
                            violations.append(entry)
                        else:
                            info.append(entry)
    return _report("no_new_collinearity", violations, info)


def check_visibility_monotone(
    events: list[TraceEvent],
    initial: Configuration,
    tol: Tolerance = DEFAULT_TOL,
    strict_gains: bool = False,
) -> CheckReport:
    """Visible sets never shrink between quiescent instants.

    With strict_gains (sequential schedules, where each move sits alone
    between two quiescents) every completed move must strictly grow the
    visible set of at least two other robots; otherwise the gain count is
    reported as info.
    """
    tl = Timeline(initial, events)
    violations: list[dict] = []
    info: list[dict] = []
    sets_at: list[tuple[float, list[frozenset[int]]]] = []
    for ev in tl.quiescent:
        sets_at.append((ev.t, analyze(tl.positions_at(ev.t), tol).visible_sets()))

    for (t_prev, prev), (t_cur, cur) in zip(sets_at, sets_at[1:]):
        for i in range(initial.n):
            lost = prev[i] - cur[i]
            if lost:
                violations.append(
                    {"t": t_cur, "robot": i, "lost": sorted(lost), "since": t_prev}
                )

    qtimes = [t for t, _ in sets_at]
    for mv in tl.moves:
        before_idx = bisect_right(qtimes, mv.t_start) - 1
        after_idx = bisect_right(qtimes, mv.t_end) - 1
        if before_idx < 0 or after_idx <= before_idx:
            continue
        before = sets_at[before_idx][1]
        after = sets_at[after_idx][1]
        gainers = [
            j
            for j in range(initial.n)
            if j != mv.robot and len(after[j]) > len(before[j])
        ]
        entry = {"t": mv.t_end, "robot": mv.robot, "gainers": gainers}
        if len(gainers) < 2:
            if strict_gains:
                violations.append(entry)
            else:
                info.append(entry)
    return _report("visibility_monotone", violations, info)


def check_hull_invariant(
    events: list[TraceEvent], initial: Configuration, tol: Tolerance = DEFAULT_TOL
) -> CheckReport:
    """Hull-vertex robots never move; nobody ever leaves the initial hull;
    the final hull vertices are the initial ones.

    For a degenerate (fully collinear) start only the two extreme robots
    are required to stay put; hull growth is reported as info.
    """
    tl = Timeline(initial, events)
    hull = convex_hull(list(initial.positions), tol)
    diameter = max(
        (dist(a, b) for a in hull.vertices for b in hull.vertices), default=0.0
    )
    slack = tol.eps_col * max(diameter, 1e-12)
    degenerate = len(hull.vertices) <= 2
    violations: list[dict] = []
    info: list[dict] = []

    movers = {ev.robot for ev in events if ev.kind == MOVE_START}
    for i in hull.vertex_indices:
        if i in movers:
            violations.append({"robot": i, "why": "hull vertex moved"})

    if degenerate:
        final = tl.positions_at(math.inf)
        fhull = convex_hull(list(final.positions), tol)
        if len(fhull.vertices) > len(hull.vertices):
            info.append(
                {"why": "degenerate hull grew", "final_vertices": len(fhull.vertices)}
            )
        return _report("hull_invariant", violations, info)

    times = sorted({ev.t for ev in events})
    for t in times:
        for i in range(initial.n):
            p = tl.position_at(i, t)
            margin = hull_margin(hull.vertices, p)
            if margin < -slack:
                violations.append({"t": t, "robot": i, "outside_by": -margin})

    final = tl.positions_at(math.inf)
    fhull = convex_hull(list(final.positions), tol)
    if set(fhull.vertices) != set(hull.vertices):
        violations.append(
            {
                "why": "final hull vertices differ",
                "initial": [list(p) for p in hull.vertices],
                "final": [list(p) for p in fhull.vertices],
            }
        )
    return _report("hull_invariant", violations, info)


def check_disp_bound(
    events: list[TraceEvent],
    initial: Configuration,
    tol: Tolerance = DEFAULT_TOL,
    slack: float = 1e-9,
) -> CheckReport:
    """No observer sees a mover swing by more than the mover's declared cap.

    The angle is measured at each robot visible in the mover's own Look
    snapshot, between the move's start point and its actual stop.  Moves
    taken with an all-collinear view carry no cap and are skipped.
    """
    tl = Timeline(initial, events)
    violations: list[dict] = []
    checked = 0
    for mv in tl.moves:
        cp = mv.compute_payload
        if not cp or not cp.get("eligible") or cp.get("collinear_view"):
            continue
        cap = cp["disp_cap"]
        if mv.landed == mv.start:
            continue
        for raw in mv.look_payload.get("vis_pos", []):
            watcher = Point2(*raw)
            swing = angle_at(watcher, mv.start, mv.landed)
            checked += 1
            if swing > cap + slack:
                violations.append(
                    {
                        "t": mv.t_end,
                        "robot": mv.robot,
                        "watcher": list(watcher),
                        "swing": swing,
                        "cap": cap,
                    }
                )
    return _report("disp_bound", violations, [{"angles_checked": checked}])


def check_move_count(move_counts, n: int) -> CheckReport:
    """Nobody moves more than ceil((n-1)/2) times."""
    bound = math.ceil((n - 1) / 2)
    violations = [
        {"robot": i, "moves": c, "bound": bound}
        for i, c in enumerate(move_counts)
        if c > bound
    ]
    return _report("move_count", violations)


def measured_min_angle(ana: SceneAnalysis, i: int, tol: Tolerance = DEFAULT_TOL) -> float:
    """Recompute one robot's minimum separation angle from global knowledge."""
    snap = _global_snapshot(ana, i)
    gaps = algo.view_gaps(snap, tol)
    nangles = algo.neighbor_view_angles(snap, snap.neighbor_views)
    m, _, _ = algo.min_separation(gaps, nangles, ana.cfg.n, tol)
    return m


def _global_snapshot(ana: SceneAnalysis, i: int) -> algo.Snapshot:
    pts = ana.cfg.positions
    seen_ids = ana.views[i].visible
    neighbor_views = []
    for j in seen_ids:
        members = [pts[m] for m in ana.views[j].visible]
        jl = pts[j]
        members.sort(key=lambda p: math.atan2(p[1] - jl[1], p[0] - jl[0]))
        neighbor_views.append(tuple(members))
    return algo.Snapshot(
        self_pos=pts[i],
        seen=tuple(pts[j] for j in seen_ids),
        n=ana.cfg.n,
        frame=IDENTITY_FRAME,
        neighbor_views=tuple(neighbor_views),
    )


def check_min_angle_bound(
    cfg: Configuration,
    tol: Tolerance = DEFAULT_TOL,
    recorded: list[tuple[int, float]] | None = None,
    slack: float = 1e-9,
) -> CheckReport:
    """Every robot's minimum separation angle is at most pi/3.

    Recomputed from the configuration when it has three non-collinear
    robots (a fully collinear start is skipped with a note); any recorded
    per-move values from a trace are checked as well.
    """
    violations: list[dict] = []
    info: list[dict] = []
    ana = analyze(cfg, tol)
    full_count = cfg.n * (cfg.n - 1) * (cfg.n - 2) // 6
    if cfg.n >= 3 and len(ana.triples) < full_count:
        for i in range(cfg.n):
            m = measured_min_angle(ana, i, tol)
            if m > MIN_ANGLE_LIMIT + slack:
                violations.append({"robot": i, "min_angle": m})
    else:
        info.append({"why": "configuration fully collinear; recomputation skipped"})
    for robot, value in recorded or ():
        if value > MIN_ANGLE_LIMIT + slack:
            violations.append({"robot": robot, "min_angle": value, "recorded": True})
    return _report("min_angle_bound", violations, info)


def check_collision_free(
    events: list[TraceEvent], initial: Configuration, tol: Tolerance = DEFAULT_TOL
) -> CheckReport:
    """Positions stay pairwise distinct, including while robots are moving."""
    tl = Timeline(initial, events)
    n = initial.n
    diameter = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            diameter = max(diameter, dist(initial.positions[i], initial.positions[j]))
    eps = tol.eps_col * max(diameter, 1e-12)
    violations: list[dict] = []

    for t in sorted({ev.t for ev in events}):
        pts = [tl.position_at(i, t) for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                d = dist(pts[i], pts[j])
                if d <= eps:
                    violations.append({"t": t, "pair": [i, j], "distance": d})

    for i in range(n):
        for t0, t1, _, _ in tl.pieces[i]:
            if t1 <= t0:
                continue
            for j in range(n):
                if j == i:
                    continue
                cuts = {t0, t1}
                for s0, s1, _, _ in tl.pieces[j]:
                    for c in (s0, s1):
                        if t0 < c < t1:
                            cuts.add(c)
                ts = sorted(cuts)
                for ta, tb in zip(ts, ts[1:]):
                    d = _min_linear_distance(tl, i, j, ta, tb)
                    if d <= 0.0:
                        violations.append({"t": ta, "pair": sorted([i, j]), "distance": d})
    return _report("collision_free", violations)


def _min_linear_distance(tl: Timeline, i: int, j: int, ta: float, tb: float) -> float:
    """Min distance of two robots over [ta, tb] where both move linearly."""
    a0 = tl.position_at(i, ta)
    a1 = tl.position_at(i, tb)
    b0 = tl.position_at(j, ta)
    b1 = tl.position_at(j, tb)
    rx = a0[0] - b0[0]
    ry = a0[1] - b0[1]
    vx = (a1[0] - b1[0]) - rx
    vy = (a1[1] - b1[1]) - ry
    vv = vx * vx + vy * vy
    best = min(math.hypot(rx, ry), math.hypot(rx + vx, ry + vy))
    if vv > 0.0:
        tau = -(rx * vx + ry * vy) / vv
        if 0.0 < tau < 1.0:
            best = min(best, math.hypot(rx + tau * vx, ry + tau * vy))
    return best


def check_bisector_crossing(
    events: list[TraceEvent], initial: Configuration, tol: Tolerance = DEFAULT_TOL
) -> CheckReport:
    """A mover never properly crosses the bisector ray of a concurrent mover."""
    tl = Timeline(initial, events)
    moves = [mv for mv in tl.moves if mv.compute_payload and mv.compute_payload.get("eligible")]
    violations: list[dict] = []
    for a in moves:
        for b in moves:
            if a is b or a.robot == b.robot:
                continue
            if a.t_look > b.t_end or b.t_look > a.t_end:
                continue
            ox, oy, ray_angle = b.compute_payload["bisec"]
            if _segment_crosses_ray(a.start, a.landed, Point2(ox, oy), ray_angle, tol):
                violations.append({"mover": a.robot, "ray_of": b.robot, "t": a.t_end})
    return _report("bisector_crossing", violations)


def _segment_crosses_ray(
    a: Point2, b: Point2, origin: Point2, angle: float, tol: Tolerance
) -> bool:
    """Proper transversal crossing of segment a-b with a ray (strict interior)."""
    ux = math.cos(angle)
    uy = math.sin(angle)
    wx = b[0] - a[0]
    wy = b[1] - a[1]
    denom = ux * wy - uy * wx
    scale = max(dist(a, origin), dist(b, origin), math.hypot(wx, wy), 1e-300)
    if abs(denom) <= 1e-15 * scale:
        return False
    t = ((a[0] - origin[0]) * wy - (a[1] - origin[1]) * wx) / denom
    s = ((a[0] - origin[0]) * uy - (a[1] - origin[1]) * ux) / denom
    eps = 1e-12
    return t > tol.eps_col * scale and eps < s < 1.0 - eps


def run_all_checks(
    events: list[TraceEvent],
    initial: Configuration,
    tol: Tolerance = DEFAULT_TOL,
    *,
    sequential: bool = False,
) -> list[CheckReport]:
    """The full checker battery for one finished run."""
    n = initial.n
    return [
        check_no_new_collinearity(events, initial, tol),
        check_visibility_monotone(events, initial, tol, strict_gains=sequential),
        check_hull_invariant(events, initial, tol),
        check_disp_bound(events, initial, tol),
        check_move_count(move_counts_from_trace(events, n), n),
        check_min_angle_bound(initial, tol, recorded=recorded_min_angles(events)),
        check_collision_free(events, initial, tol),
        check_bisector_crossing(events, initial, tol),
    ]
