"""Static SVG frames from a trace: one picture per quiescent instant.

Each frame shows the robots, the initial hull outline, any collinear
triples highlighted in red, and the bisector rays of the moves that play
out before the next quiescent instant.  Works from the trace alone.
"""

from __future__ import annotations

import math
from pathlib import Path

from .geom import DEFAULT_TOL, Point2, Tolerance, convex_hull
from .sim import COMPUTE_DONE, MOVE_END, QUIESCENT, TraceEvent
from .visibility import Configuration, collinear_triples

_W = 640
_H = 640


class _Canvas:
    def __init__(self, xmin, ymin, xmax, ymax):
        span = max(xmax - xmin, ymax - ymin, 1e-9)
        pad = 0.08 * span
        self.xmin = xmin - pad
        self.ymax = ymax + pad
        self.scale = min(_W, _H) / (span + 2 * pad)
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">',
            f'<rect width="{_W}" height="{_H}" fill="white"/>',
        ]

    def pt(self, p: Point2) -> tuple[float, float]:
        return ((p[0] - self.xmin) * self.scale, (self.ymax - p[1]) * self.scale)

    def line(self, a: Point2, b: Point2, color: str, width: float, dash: str = "") -> None:
        (x1, y1), (x2, y2) = self.pt(a), self.pt(b)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{color}" stroke-width="{width}"{extra}/>'
        )

    def dot(self, p: Point2, r: float, color: str) -> None:
        x, y = self.pt(p)
        self.parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{color}"/>')

    def text(self, p: Point2, s: str) -> None:
        x, y = self.pt(p)
        self.parts.append(
            f'<text x="{x + 6:.2f}" y="{y - 6:.2f}" font-size="11" fill="#444">{s}</text>'
        )

    def caption(self, s: str) -> None:
        self.parts.append(f'<text x="10" y="{_H - 10}" font-size="13" fill="#222">{s}</text>')

    def finish(self) -> str:
        return "\n".join(self.parts) + "\n</svg>\n"


def render_trace(
    events: list[TraceEvent],
    out_dir: str | Path,
    final_only: bool = False,
    tol: Tolerance = DEFAULT_TOL,
) -> list[Path]:
    """Write frame_NNNN.svg files; returns the paths written."""
    quiescents = [ev for ev in events if ev.kind == QUIESCENT]
    if not quiescents:
        raise ValueError("trace has no quiescent events")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    all_pts = [Point2(*p) for ev in quiescents for p in ev.payload["positions"]]
    xmin = min(p[0] for p in all_pts)
    xmax = max(p[0] for p in all_pts)
    ymin = min(p[1] for p in all_pts)
    ymax = max(p[1] for p in all_pts)

    initial_pts = [Point2(*p) for p in quiescents[0].payload["positions"]]
    hull = convex_hull(initial_pts, tol)

    # bisector rays of eligible computations, keyed by their move-end time
    rays = []
    pending: dict[int, tuple] = {}
    for ev in events:
        if ev.kind == COMPUTE_DONE and ev.payload.get("eligible"):
            pending[ev.robot] = tuple(ev.payload["bisec"])
        elif ev.kind == MOVE_END and ev.robot in pending:
            rays.append((ev.t, pending.pop(ev.robot)))

    frames = list(enumerate(quiescents))
    if final_only:
        frames = frames[-1:]
    written = []
    span = max(xmax - xmin, ymax - ymin, 1e-9)
    for idx, ev in frames:
        cv = _Canvas(xmin, ymin, xmax, ymax)
        verts = hull.vertices
        for k in range(len(verts)):
            cv.line(verts[k], verts[(k + 1) % len(verts)], "#bbbbbb", 1.0)
        pts = [Point2(*p) for p in ev.payload["positions"]]
        cfg = Configuration(tuple(pts))
        for i, j, k in collinear_triples(cfg, tol):
            cv.line(pts[i], pts[k], "#d62728", 1.2)
        t_next = quiescents[idx + 1].t if idx + 1 < len(quiescents) else math.inf
        for t_end, (ox, oy, ang) in rays:
            if ev.t < t_end <= t_next:
                tip = Point2(ox + 0.35 * span * math.cos(ang), oy + 0.35 * span * math.sin(ang))
                cv.line(Point2(ox, oy), tip, "#1f77b4", 1.0, dash="4,3")
        for i, p in enumerate(pts):
            cv.dot(p, 4.0, "#222222")
            cv.text(p, str(i))
        triples = ev.payload.get("triples", "?")
        cv.caption(f"t={ev.t:.3f}  collinear triples={triples}")
        path = out / f"frame_{idx:04d}.svg"
        path.write_text(cv.finish(), encoding="utf-8")
        written.append(path)
    return written
