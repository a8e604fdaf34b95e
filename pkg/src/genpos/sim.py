"""Deterministic seeded look-compute-move engine.

Continuous time, constant motion speed, one event heap.  A robot's cycle
is Look (instantaneous snapshot of the true, possibly mid-move,
positions) -> ComputeDone one tick later (destination decided, stop point
drawn) -> MoveStart -> MoveEnd.  Robots are never re-activated mid-cycle.

The adversary is split into three independently seeded choices: the
activation schedule, the stop point of each non-rigid move, and the
private rotated/reflected frame each robot senses in.  Identical
(initial, params) reproduce the event list bit for bit.
"""

from __future__ import annotations

import heapq
import math
import random
import time as _time
from dataclasses import dataclass
from enum import Enum

from . import algo
from .geom import DEFAULT_TOL, Frame, Point2, Tolerance, dist
from .visibility import Configuration, RobotClass, SceneAnalysis, analyze

LOOK = "Look"
COMPUTE_DONE = "ComputeDone"
MOVE_START = "MoveStart"
MOVE_END = "MoveEnd"
QUIESCENT = "Quiescent"

_COMPUTE_TICK = 1.0


class Scheduler(Enum):
    SEQUENTIAL = "sequential"
    FULLSYNC = "fullsync"
    SEMISYNC = "semisync"
    ASYNC = "async"


class StopPolicy(Enum):
    RIGID = "rigid"
    UNIFORM_RANDOM = "uniform_random"
    MIN_PROGRESS = "min_progress"


class BudgetExhausted(RuntimeError):
    """max_events reached before the run went quiescent in general position."""


@dataclass(frozen=True)
class SimParams:
    n: int
    seed: int = 0
    scheduler: Scheduler = Scheduler.ASYNC
    stop_policy: StopPolicy = StopPolicy.RIGID
    delta_min: float | None = None  # None: 1e-3 * initial diameter
    speed: float = 1.0
    fairness_bound: int | None = None  # None: 64 * n
    max_events: int = 100_000
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.max_events <= 0:
            raise ValueError("max_events must be positive")
        if self.delta_min is not None and self.delta_min <= 0.0:
            raise ValueError("delta_min must be positive")
        if self.fairness_bound is not None and self.fairness_bound < self.n:
            raise ValueError("fairness_bound must be at least n")
        if self.speed <= 0.0:
            raise ValueError("speed must be positive")


@dataclass(frozen=True)
class TraceEvent:
    t: float
    kind: str
    robot: int | None
    payload: dict


@dataclass(frozen=True)
class RunResult:
    final_cfg: Configuration
    terminated: bool
    events_used: int
    move_counts: tuple[int, ...]
    wall_s: float


def choose_stop(
    start: Point2,
    decision: algo.MoveDecision,
    policy: StopPolicy,
    rng: random.Random,
    delta_min: float,
) -> Point2:
    """Where the adversary actually halts the robot.

    Any planned move no longer than delta_min is completed in full; a
    longer one may be cut anywhere at or beyond delta_min.
    """
    dest = decision.destination
    length = dist(start, dest)
    if length <= 0.0:
        raise ValueError("zero-length move")
    if policy is StopPolicy.RIGID or length <= delta_min:
        return dest
    if policy is StopPolicy.MIN_PROGRESS:
        f = delta_min / length
    else:
        f = rng.uniform(delta_min, length) / length
    return Point2(start[0] + f * (dest[0] - start[0]), start[1] + f * (dest[1] - start[1]))


@dataclass
class _MoveRecord:
    start: Point2
    stop: Point2
    t0: float
    t1: float


class Simulation:
    """Mutable engine state; `advance` pops and applies one scheduled event."""

    def __init__(self, initial: Configuration, params: SimParams):
        if params.n != initial.n:
            raise ValueError(f"params.n={params.n} but configuration has {initial.n}")
        initial.validate_distinct()
        self.params = params
        self.initial = initial
        self.tol = params.tol
        self.time = 0.0
        self.events_used = 0
        self.trace: list[TraceEvent] = []
        self.move_counts = [0] * params.n
        self._settled: list[Point2] = list(initial.positions)
        self._rng = random.Random(params.seed)

        diameter = 0.0
        for i in range(initial.n):
            for j in range(i + 1, initial.n):
                diameter = max(diameter, dist(initial.positions[i], initial.positions[j]))
        self.diameter = diameter
        self.delta_min = (
            params.delta_min if params.delta_min is not None else max(1e-3 * diameter, 1e-12)
        )
        self.fairness_bound = (
            params.fairness_bound if params.fairness_bound is not None else 64 * params.n
        )

        self.frames: list[Frame] = [
            Frame(
                origin=initial.positions[i],
                angle=self._rng.uniform(0.0, 2.0 * math.pi),
                reflect=self._rng.random() < 0.5,
            )
            for i in range(params.n)
        ]

        self._heap: list[tuple[float, int, str, int]] = []
        self._seq = 0
        self._cancelled: set[int] = set()
        self._pending_look: dict[int, tuple[algo.Snapshot, bool]] = {}
        self._pending_move: dict[int, tuple[algo.MoveDecision, Point2]] = {}
        self._moving: dict[int, _MoveRecord] = {}
        self._version = 0
        self._cache: tuple[int, SceneAnalysis] | None = None
        self._last_look_event = [0] * params.n
        self._pending_look_entry: dict[int, tuple[int, float]] = {}  # robot -> (seq, time)

        # seeded rotation: one-at-a-time scheduling stays fair while the
        # activation order remains an adversary choice; a fixed ascending
        # order is pathologically bad on collinear starts (each robot would
        # always look right after its line neighbor moved)
        self._rotation_order = self._rng.sample(range(params.n), params.n)
        self._rotation = 0
        self._round_open: set[int] = set()
        sched = params.scheduler
        if sched is Scheduler.SEQUENTIAL:
            self._push(1.0, LOOK, self._rotation_order[0])
        elif sched is Scheduler.FULLSYNC:
            self._start_round(1.0, list(range(params.n)))
        elif sched is Scheduler.SEMISYNC:
            self._start_round(1.0, self._draw_subset())
        else:
            for i in range(params.n):
                self._push(self._rng.uniform(0.5, 1.5), LOOK, i)

        self._emit_quiescent()

    # -- scheduling ---------------------------------------------------------

    def _push(self, t: float, tag: str, robot: int) -> int:
        seq = self._seq
        self._seq += 1
        heapq.heappush(self._heap, (t, seq, tag, robot))
        if tag == LOOK:
            self._pending_look_entry[robot] = (seq, t)
        return seq

    def _draw_subset(self) -> list[int]:
        chosen = [i for i in range(self.params.n) if self._rng.random() < 0.5]
        if not chosen:
            chosen = [self._rng.randrange(self.params.n)]
        return chosen

    def _start_round(self, t: float, robots: list[int]) -> None:
        self._round_open = set(robots)
        for i in robots:
            self._push(t, LOOK, i)

    def _cycle_finished(self, robot: int, t: float) -> None:
        sched = self.params.scheduler
        if sched is Scheduler.SEQUENTIAL:
            self._rotation = (self._rotation + 1) % self.params.n
            self._push(t + 1.0, LOOK, self._rotation_order[self._rotation])
        elif sched in (Scheduler.FULLSYNC, Scheduler.SEMISYNC):
            self._round_open.discard(robot)
            if not self._round_open:
                robots = (
                    list(range(self.params.n))
                    if sched is Scheduler.FULLSYNC
                    else self._draw_subset()
                )
                self._start_round(t + 1.0, robots)
        else:
            self._push(t + self._rng.uniform(0.5, 1.5), LOOK, robot)

    def _enforce_fairness(self) -> None:
        if self.params.scheduler is not Scheduler.ASYNC:
            return
        trigger = self.fairness_bound - self.params.n - 2
        for robot, (seq, t) in list(self._pending_look_entry.items()):
            if t > self.time and self.events_used - self._last_look_event[robot] >= trigger:
                self._cancelled.add(seq)
                self._push(self.time, LOOK, robot)

    # -- state access -------------------------------------------------------

    def position_at(self, i: int, t: float) -> Point2:
        rec = self._moving.get(i)
        if rec is None:
            return self._settled[i]
        if t >= rec.t1:
            return rec.stop
        if t <= rec.t0:
            return rec.start
        f = (t - rec.t0) / (rec.t1 - rec.t0)
        return Point2(
            rec.start[0] + f * (rec.stop[0] - rec.start[0]),
            rec.start[1] + f * (rec.stop[1] - rec.start[1]),
        )

    def current_cfg(self) -> Configuration:
        return Configuration(tuple(self.position_at(i, self.time) for i in range(self.params.n)))

    def current_analysis(self) -> SceneAnalysis:
        if self._moving:
            return analyze(self.current_cfg(), self.tol)
        if self._cache is None or self._cache[0] != self._version:
            self._cache = (self._version, analyze(Configuration(tuple(self._settled)), self.tol))
        return self._cache[1]

    def in_flight(self) -> bool:
        return bool(self._pending_look or self._pending_move or self._moving)

    def is_terminated(self) -> bool:
        if self.in_flight():
            return False
        return not self.current_analysis().triples

    def snapshot_at(self, i: int) -> algo.Snapshot:
        """Robot i's local-frame snapshot of the current instant, with the
        ground-truth angular views of each visible robot attached."""
        ana = self.current_analysis()
        pts = ana.cfg.positions
        frame = self.frames[i]
        self_local = frame.to_local(pts[i])

        seen_ids = ana.views[i].visible
        locs = [frame.to_local(pts[j]) for j in seen_ids]
        order = sorted(
            range(len(seen_ids)),
            key=lambda k: math.atan2(locs[k][1] - self_local[1], locs[k][0] - self_local[0]),
        )
        neighbor_views = []
        for k in order:
            j = seen_ids[k]
            jl = locs[k]
            members = [frame.to_local(pts[m]) for m in ana.views[j].visible]
            members.sort(key=lambda p: math.atan2(p[1] - jl[1], p[0] - jl[0]))
            neighbor_views.append(tuple(members))
        return algo.Snapshot(
            self_pos=self_local,
            seen=tuple(locs[k] for k in order),
            n=self.params.n,
            frame=frame,
            neighbor_views=tuple(neighbor_views),
        )

    # -- event processing ---------------------------------------------------

    def _emit(self, kind: str, robot: int | None, payload: dict) -> TraceEvent:
        ev = TraceEvent(t=self.time, kind=kind, robot=robot, payload=payload)
        self.trace.append(ev)
        return ev

    def _emit_quiescent(self) -> TraceEvent:
        ana = self.current_analysis()
        return self._emit(
            QUIESCENT,
            None,
            {
                "triples": len(ana.triples),
                "sum_visible": ana.sum_visible,
                "positions": [[p[0], p[1]] for p in self._settled],
            },
        )

    def advance(self) -> list[TraceEvent]:
        """Process the next scheduled event; returns the emitted trace events."""
        if self.events_used >= self.params.max_events:
            raise BudgetExhausted(f"{self.events_used} events used")
        while True:
            if not self._heap:
                raise RuntimeError("event heap empty")
            t, seq, tag, robot = heapq.heappop(self._heap)
            if seq in self._cancelled:
                self._cancelled.discard(seq)
                continue
            break
        self.time = t
        emitted: list[TraceEvent] = []

        if tag == LOOK:
            self._pending_look_entry.pop(robot, None)
            self._last_look_event[robot] = self.events_used
            ana = self.current_analysis()
            snap = self.snapshot_at(robot)
            cls = ana.classes[robot]
            eligible = algo.is_eligible(snap, cls, bool(ana.blocked[robot]))
            self._pending_look[robot] = (snap, eligible)
            vis = ana.views[robot].visible
            emitted.append(
                self._emit(
                    LOOK,
                    robot,
                    {
                        "pos": list(ana.cfg.positions[robot]),
                        "visible": list(vis),
                        "vis_pos": [list(ana.cfg.positions[j]) for j in vis],
                        "class": cls.value,
                        "eligible": eligible,
                    },
                )
            )
            self._push(t + _COMPUTE_TICK, COMPUTE_DONE, robot)

        elif tag == COMPUTE_DONE:
            snap, eligible = self._pending_look.pop(robot)
            if eligible:
                # global hull class and the local view can disagree inside
                # the tolerance band; a locally hull-vertex-like view means
                # this cycle must be a no-op, never a crash
                try:
                    decision = algo.compute_destination(snap, tol=self.tol)
                except algo.NotEligible:
                    eligible = False
            if not eligible:
                emitted.append(self._emit(COMPUTE_DONE, robot, {"eligible": False}))
                self._cycle_finished(robot, t)
            else:
                start = self._settled[robot]
                stop = choose_stop(
                    start, decision, self.params.stop_policy, self._rng, self.delta_min
                )
                self._pending_move[robot] = (decision, stop)
                q = decision.quantities
                gdir = snap.frame.to_global(q.bisector.point_at(1.0))
                gorigin = snap.frame.to_global(q.bisector.origin)
                emitted.append(
                    self._emit(
                        COMPUTE_DONE,
                        robot,
                        {
                            "eligible": True,
                            "chosen_gap": q.chosen_gap,
                            "min_angle": q.min_angle,
                            "disp_cap": q.disp_cap,
                            "clearance": None if math.isinf(q.clearance) else q.clearance,
                            "nearest": q.nearest,
                            "step": q.step,
                            "collinear_view": q.collinear_view,
                            "dest": list(decision.destination),
                            "bisec": [
                                gorigin[0],
                                gorigin[1],
                                math.atan2(gdir[1] - gorigin[1], gdir[0] - gorigin[0]),
                            ],
                        },
                    )
                )
                self._push(t, MOVE_START, robot)

        elif tag == MOVE_START:
            decision, stop = self._pending_move.pop(robot)
            start = self._settled[robot]
            duration = dist(start, stop) / self.params.speed
            self._moving[robot] = _MoveRecord(start=start, stop=stop, t0=t, t1=t + duration)
            emitted.append(
                self._emit(
                    MOVE_START,
                    robot,
                    {"from": list(start), "to": list(decision.destination), "stop": list(stop)},
                )
            )
            self._push(t + duration, MOVE_END, robot)

        elif tag == MOVE_END:
            rec = self._moving.pop(robot)
            self._settled[robot] = rec.stop
            self._version += 1
            self.move_counts[robot] += 1
            emitted.append(self._emit(MOVE_END, robot, {"at": list(rec.stop)}))
            if not self._moving:
                emitted.append(self._emit_quiescent())
            self._cycle_finished(robot, t)

        else:  # pragma: no cover
            raise AssertionError(f"unknown tag {tag}")

        self.events_used += 1
        self._enforce_fairness()
        return emitted


def run(initial: Configuration, params: SimParams) -> tuple[RunResult, list[TraceEvent]]:
    """Drive a simulation until general position is reached or the budget ends."""
    started = _time.perf_counter()
    sim = Simulation(initial, params)
    terminated = False
    while True:
        if sim.is_terminated():
            terminated = True
            break
        if sim.events_used >= params.max_events:
            break
        sim.advance()
    result = RunResult(
        final_cfg=Configuration(tuple(sim._settled)),
        terminated=terminated,
        events_used=sim.events_used,
        move_counts=tuple(sim.move_counts),
        wall_s=_time.perf_counter() - started,
    )
    return result, sim.trace
