"""Point robots with obstructed visibility spreading into general position.

A geometry kernel, global visibility analysis, the robot-local movement
rule, a deterministic asynchronous look-compute-move simulator, and a
suite of trace checkers for the motion guarantees.
"""

from .geom import (
    AngularGap,
    Direction,
    Frame,
    Point2,
    Ray,
    Tolerance,
    DEFAULT_TOL,
)
from .visibility import Configuration, RobotClass
from .algo import MoveDecision, Snapshot, compute_destination, is_eligible
from .sim import RunResult, Scheduler, SimParams, Simulation, StopPolicy, TraceEvent, run
from .scenarios import parse_scenario

__version__ = "0.1.0"

__all__ = [
    "AngularGap",
    "Configuration",
    "DEFAULT_TOL",
    "Direction",
    "Frame",
    "MoveDecision",
    "Point2",
    "Ray",
    "RobotClass",
    "RunResult",
    "Scheduler",
    "SimParams",
    "Simulation",
    "Snapshot",
    "StopPolicy",
    "Tolerance",
    "TraceEvent",
    "compute_destination",
    "is_eligible",
    "parse_scenario",
    "run",
]
