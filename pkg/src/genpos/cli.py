"""Command line front end: run scenarios, check traces, render frames.

    genpos run --scenario line6.json --seed 3 --out-trace t.jsonl
    genpos check t.jsonl --scenario line6.json
    genpos render t.jsonl --out-dir frames/

Exit codes: 0 success, 2 event budget exhausted before general position,
1 anything else (parse errors, failed checks, I/O).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import oracle, render as render_mod, sim, traceio
from .scenarios import DuplicatePosition, ParseError, parse_scenario, scenario_name
from .visibility import collinear_triples

METRICS_HEADER = [
    "scenario",
    "seed",
    "scheduler",
    "terminated",
    "events",
    "total_moves",
    "max_moves_per_robot",
    "initial_triples",
    "wall_ms",
]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="genpos", description=__doc__.strip().splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    rp = sub.add_parser("run", help="simulate a scenario")
    rp.add_argument("--scenario", required=True)
    rp.add_argument("--seed", type=int, default=None)
    rp.add_argument("--scheduler", choices=[s.value for s in sim.Scheduler], default=None)
    rp.add_argument("--stop-policy", choices=[s.value for s in sim.StopPolicy], default=None)
    rp.add_argument("--delta-min", type=float, default=None)
    rp.add_argument("--eps-col", type=float, default=None)
    rp.add_argument("--max-events", type=int, default=None)
    rp.add_argument("--out-trace", default=None)
    rp.add_argument("--out-metrics", default=None)
    rp.add_argument("--render", default=None, metavar="DIR")
    rp.add_argument("--final-only", action="store_true")
    rp.add_argument("--sweep", type=int, default=None, metavar="N",
                    help="run N consecutive seeds concurrently")

    cp = sub.add_parser("check", help="run all trace checkers")
    cp.add_argument("trace")
    cp.add_argument("--scenario", required=True)

    xp = sub.add_parser("render", help="render SVG frames from a trace")
    xp.add_argument("trace")
    xp.add_argument("--out-dir", required=True)
    xp.add_argument("--final-only", action="store_true")
    return ap


def _apply_overrides(params: sim.SimParams, args) -> sim.SimParams:
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.scheduler is not None:
        updates["scheduler"] = sim.Scheduler(args.scheduler)
    if args.stop_policy is not None:
        updates["stop_policy"] = sim.StopPolicy(args.stop_policy)
    if args.delta_min is not None:
        updates["delta_min"] = args.delta_min
    if args.max_events is not None:
        updates["max_events"] = args.max_events
    if args.eps_col is not None:
        updates["tol"] = dataclasses.replace(params.tol, eps_col=args.eps_col)
    return dataclasses.replace(params, **updates) if updates else params


def _metrics_row(name, params, cfg, result) -> dict:
    return {
        "scenario": name,
        "seed": params.seed,
        "scheduler": params.scheduler.value,
        "terminated": int(result.terminated),
        "events": result.events_used,
        "total_moves": sum(result.move_counts),
        "max_moves_per_robot": max(result.move_counts),
        "initial_triples": len(collinear_triples(cfg, params.tol)),
        "wall_ms": round(result.wall_s * 1000.0, 3),
    }


def _write_metrics(path: str, rows: list[dict]) -> None:
    p = Path(path)
    fresh = not p.exists() or p.stat().st_size == 0
    with open(p, "a", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=METRICS_HEADER)
        if fresh:
            w.writeheader()
        for row in rows:
            w.writerow(row)


def cmd_run(args) -> int:
    try:
        cfg, params = parse_scenario(args.scenario)
    except (ParseError, DuplicatePosition) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    params = _apply_overrides(params, args)
    name = scenario_name(args.scenario)

    if args.sweep:
        return _cmd_sweep(name, cfg, params, args)

    result, events = sim.run(cfg, params)
    if args.out_trace:
        traceio.write_trace(args.out_trace, events)
    if args.out_metrics:
        _write_metrics(args.out_metrics, [_metrics_row(name, params, cfg, result)])
    if args.render:
        render_mod.render_trace(events, args.render, final_only=args.final_only, tol=params.tol)
    print(
        json.dumps(
            {
                "scenario": name,
                "terminated": result.terminated,
                "events": result.events_used,
                "moves": list(result.move_counts),
            }
        )
    )
    return 0 if result.terminated else 2


def _cmd_sweep(name, cfg, params, args) -> int:
    seeds = [params.seed + k for k in range(args.sweep)]
    rows: dict[int, dict] = {}
    lock = threading.Lock()

    def one(seed: int) -> bool:
        p = dataclasses.replace(params, seed=seed)
        result, _ = sim.run(cfg, p)
        with lock:
            rows[seed] = _metrics_row(name, p, cfg, result)
        return result.terminated

    with ThreadPoolExecutor(max_workers=min(8, len(seeds))) as pool:
        ok = list(pool.map(one, seeds))
    ordered = [rows[s] for s in seeds]
    if args.out_metrics:
        _write_metrics(args.out_metrics, ordered)
    print(
        json.dumps(
            {
                "scenario": name,
                "sweep": len(seeds),
                "terminated": sum(map(int, ok)),
                "max_events": max(r["events"] for r in ordered),
            }
        )
    )
    return 0 if all(ok) else 2


def cmd_check(args) -> int:
    try:
        cfg, params = parse_scenario(args.scenario)
        events = traceio.read_trace(args.trace)
    except (ParseError, DuplicatePosition, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sequential = params.scheduler is sim.Scheduler.SEQUENTIAL
    reports = oracle.run_all_checks(events, cfg, params.tol, sequential=sequential)
    all_ok = True
    for rep in reports:
        print(json.dumps(rep.to_dict()))
        all_ok = all_ok and rep.passed
    return 0 if all_ok else 1


def cmd_render(args) -> int:
    try:
        events = traceio.read_trace(args.trace)
        written = render_mod.render_trace(events, args.out_dir, final_only=args.final_only)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({"frames": len(written), "dir": str(args.out_dir)}))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "check":
        return cmd_check(args)
    return cmd_render(args)


if __name__ == "__main__":
    sys.exit(main())
