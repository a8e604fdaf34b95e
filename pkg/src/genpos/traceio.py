"""JSONL trace files: one event per line, replayable bit for bit.

Line schema: {"t": float, "kind": str, "robot": int|null, "payload": {...}}.
Floats are serialized with Python's shortest round-trip repr, so reloading
reproduces the exact doubles the run produced.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .sim import TraceEvent


def event_to_json(ev: TraceEvent) -> str:
    return json.dumps(
        {"t": ev.t, "kind": ev.kind, "robot": ev.robot, "payload": ev.payload},
        separators=(",", ":"),
    )


def write_trace(path: str | Path, events: Iterable[TraceEvent]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ev in events:
            fh.write(event_to_json(ev))
            fh.write("\n")


def read_trace(path: str | Path) -> list[TraceEvent]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            out.append(
                TraceEvent(
                    t=obj["t"], kind=obj["kind"], robot=obj["robot"], payload=obj["payload"]
                )
            )
    return out
