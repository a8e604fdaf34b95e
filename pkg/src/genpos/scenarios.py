"""Scenario files: JSON in, (Configuration, SimParams) out.

A scenario either lists explicit positions or names a generator:

    {"name": "demo",
     "positions": [[0,0],[1,0]],              # wins over generator
     "generator": {"kind": "line", "n": 6, "seed": 1,
                   "collinear_fraction": 0.3},
     "params": {"seed": 42, "scheduler": "async",
                "stop_policy": "uniform_random", "delta_min": 0.001,
                "eps_col": 1e-12, "eps_ang": 1e-10,
                "max_events": 5000, "speed": 1.0, "fairness_bound": 256}}

Generators expand deterministically from their own seed; the run seed in
params is independent.
"""

from __future__ import annotations

import json
import math
import random
from pathlib import Path

from .geom import Point2, Tolerance
from .sim import Scheduler, SimParams, StopPolicy
from .visibility import Configuration


class ParseError(ValueError):
    """Malformed scenario file; the message names the offending field."""


class DuplicatePosition(ValueError):
    """Two robots share a position."""


def generate(kind: str, n: int = 0, collinear_fraction: float = 0.3, seed: int = 0) -> list[Point2]:
    """Expand a generator spec into positions."""
    if kind == "square_center":
        return [
            Point2(-1.0, -1.0),
            Point2(1.0, -1.0),
            Point2(1.0, 1.0),
            Point2(-1.0, 1.0),
            Point2(0.0, 0.0),
        ]
    if kind == "line":
        if n < 2:
            raise ParseError(f"generator.line needs n >= 2, got {n}")
        return [Point2(float(i), 0.0) for i in range(n)]
    if kind == "grid":
        if n < 2:
            raise ParseError(f"generator.grid needs n >= 2, got {n}")
        k = math.ceil(math.sqrt(n))
        return [Point2(float(i % k), float(i // k)) for i in range(n)]
    if kind == "random_planted":
        return _random_planted(n, collinear_fraction, seed)
    raise ParseError(f"unknown generator kind {kind!r}")


def _random_planted(n: int, collinear_fraction: float, seed: int) -> list[Point2]:
    """Random cloud with a fraction of robots planted exactly on sightlines.

    Planted robots sit strictly between two base robots, so they start out
    both collinear and blocking.
    """
    if n < 3:
        raise ParseError(f"generator.random_planted needs n >= 3, got {n}")
    if not (0.0 <= collinear_fraction <= 0.8):
        raise ParseError(f"collinear_fraction out of [0, 0.8]: {collinear_fraction}")
    rng = random.Random(seed)
    planted = int(round(collinear_fraction * n))
    base = n - planted
    if base < 2:
        base = 2
        planted = n - 2
    pts: list[Point2] = []

    def far_enough(p: Point2, min_sep: float) -> bool:
        return all((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 >= min_sep * min_sep for q in pts)

    while len(pts) < base:
        p = Point2(rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0))
        if far_enough(p, 0.2):
            pts.append(p)
    for _ in range(planted):
        for _attempt in range(1000):
            a, b = rng.sample(range(len(pts)), 2)
            t = rng.uniform(0.25, 0.75)
            pa, pb = pts[a], pts[b]
            p = Point2(pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))
            if far_enough(p, 0.05):
                pts.append(p)
                break
        else:
            raise ParseError("random_planted could not place a collinear robot")
    return pts


_SCHEDULERS = {s.value: s for s in Scheduler}
_STOP_POLICIES = {s.value: s for s in StopPolicy}


def params_from_dict(raw: dict, n: int) -> SimParams:
    """Build SimParams from the scenario's params object (all keys optional)."""
    known = {
        "seed",
        "scheduler",
        "stop_policy",
        "delta_min",
        "speed",
        "fairness_bound",
        "max_events",
        "eps_col",
        "eps_ang",
    }
    for key in raw:
        if key not in known:
            raise ParseError(f"unknown params field {key!r}")
    sched = raw.get("scheduler", "async")
    if sched not in _SCHEDULERS:
        raise ParseError(f"unknown scheduler {sched!r}")
    policy = raw.get("stop_policy", "rigid")
    if policy not in _STOP_POLICIES:
        raise ParseError(f"unknown stop_policy {policy!r}")
    try:
        tol = Tolerance(
            eps_col=float(raw.get("eps_col", 1e-12)), eps_ang=float(raw.get("eps_ang", 1e-10))
        )
        return SimParams(
            n=n,
            seed=int(raw.get("seed", 0)),
            scheduler=_SCHEDULERS[sched],
            stop_policy=_STOP_POLICIES[policy],
            delta_min=(None if raw.get("delta_min") is None else float(raw["delta_min"])),
            speed=float(raw.get("speed", 1.0)),
            fairness_bound=(
                None if raw.get("fairness_bound") is None else int(raw["fairness_bound"])
            ),
            max_events=int(raw.get("max_events", 100_000)),
            tol=tol,
        )
    except ValueError as exc:
        raise ParseError(f"bad params value: {exc}") from exc


def scenario_name(path: str | Path) -> str:
    """The scenario's 'name' field, or the file stem when absent."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if isinstance(raw, dict) and isinstance(raw.get("name"), str):
            return raw["name"]
    except (OSError, json.JSONDecodeError):
        pass
    return Path(path).stem


def parse_scenario(path: str | Path) -> tuple[Configuration, SimParams]:
    """Load a scenario file; explicit positions take precedence over a generator."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: top level must be an object")

    if "positions" in raw and raw["positions"] is not None:
        try:
            pts = [Point2(float(x), float(y)) for x, y in raw["positions"]]
        except (TypeError, ValueError) as exc:
            raise ParseError(f"positions: {exc}") from exc
    elif "generator" in raw:
        gen = raw["generator"]
        if not isinstance(gen, dict) or "kind" not in gen:
            raise ParseError("generator must be an object with a 'kind'")
        pts = generate(
            gen["kind"],
            n=int(gen.get("n", 0)),
            collinear_fraction=float(gen.get("collinear_fraction", 0.3)),
            seed=int(gen.get("seed", 0)),
        )
    else:
        raise ParseError("scenario needs 'positions' or 'generator'")

    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if pts[i] == pts[j]:
                raise DuplicatePosition(f"robots {i} and {j} share position {pts[i]}")

    for p in pts:
        if not (math.isfinite(p[0]) and math.isfinite(p[1])):
            raise ParseError(f"non-finite position {p}")

    cfg = Configuration(tuple(pts))
    params = params_from_dict(raw.get("params", {}) or {}, n=cfg.n)
    return cfg, params
