import csv
import json

import pytest

from genpos.cli import METRICS_HEADER, main
from genpos.geom import Point2
from genpos.scenarios import DuplicatePosition, ParseError, generate, parse_scenario
from genpos.sim import Scheduler, StopPolicy
from genpos.visibility import collinear_triples


def write_scenario(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def square_scn(tmp_path):
    return write_scenario(
        tmp_path / "sq.json",
        {"name": "square_center", "generator": {"kind": "square_center"},
         "params": {"seed": 5, "scheduler": "sequential"}},
    )


@pytest.fixture
def line6_scn(tmp_path):
    return write_scenario(
        tmp_path / "line6.json",
        {"name": "line6", "generator": {"kind": "line", "n": 6},
         "params": {"seed": 9, "scheduler": "async", "stop_policy": "uniform_random"}},
    )


# -- parsing ---------------------------------------------------------------------


def test_parse_square_center(square_scn):
    cfg, params = parse_scenario(square_scn)
    assert cfg.n == 5
    assert set(cfg.positions) == {
        Point2(-1, -1), Point2(1, -1), Point2(1, 1), Point2(-1, 1), Point2(0, 0)
    }
    assert params.scheduler is Scheduler.SEQUENTIAL
    assert params.seed == 5


def test_parse_line_generator(line6_scn):
    cfg, params = parse_scenario(line6_scn)
    assert cfg.positions == tuple(Point2(float(i), 0.0) for i in range(6))
    assert params.stop_policy is StopPolicy.UNIFORM_RANDOM


def test_parse_duplicate_positions(tmp_path):
    scn = write_scenario(tmp_path / "dup.json", {"positions": [[0, 0], [1, 1], [0, 0]]})
    with pytest.raises(DuplicatePosition):
        parse_scenario(scn)


def test_parse_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(ParseError):
        parse_scenario(bad)
    with pytest.raises(ParseError):
        parse_scenario(write_scenario(tmp_path / "k.json", {"generator": {"kind": "mystery"}}))
    with pytest.raises(ParseError):
        parse_scenario(write_scenario(tmp_path / "p.json", {"positions": [[0, 0]],
                                                            "params": {"warp": 9}}))


def test_explicit_positions_beat_generator(tmp_path):
    scn = write_scenario(
        tmp_path / "both.json",
        {"positions": [[0, 0], [2, 0]], "generator": {"kind": "line", "n": 6}},
    )
    cfg, _ = parse_scenario(scn)
    assert cfg.n == 2


def test_random_planted_generator_plants_collinearity():
    pts = generate("random_planted", n=12, collinear_fraction=0.3, seed=4)
    assert len(pts) == 12
    assert len(set(pts)) == 12
    from genpos.visibility import Configuration

    assert collinear_triples(Configuration(tuple(pts)))


# -- run -------------------------------------------------------------------------


def test_cmd_run_square(square_scn, tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    metrics = tmp_path / "m.csv"
    rc = main(["run", "--scenario", square_scn, "--out-trace", str(trace),
               "--out-metrics", str(metrics)])
    assert rc == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["terminated"] is True
    assert sum(summary["moves"]) == 1
    with open(metrics) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0].keys()) == METRICS_HEADER
    assert rows[0]["scenario"] == "square_center"
    assert rows[0]["total_moves"] == "1"
    assert rows[0]["initial_triples"] == "2"


def test_cmd_run_budget_exit_code(line6_scn, capsys):
    rc = main(["run", "--scenario", line6_scn, "--max-events", "1"])
    assert rc == 2


def test_cmd_run_deterministic_trace_bytes(line6_scn, tmp_path):
    t1 = tmp_path / "a.jsonl"
    t2 = tmp_path / "b.jsonl"
    assert main(["run", "--scenario", line6_scn, "--out-trace", str(t1)]) == 0
    assert main(["run", "--scenario", line6_scn, "--out-trace", str(t2)]) == 0
    assert t1.read_bytes() == t2.read_bytes()


def test_cmd_run_seed_override_changes_trace(line6_scn, tmp_path):
    t1 = tmp_path / "a.jsonl"
    t2 = tmp_path / "b.jsonl"
    main(["run", "--scenario", line6_scn, "--out-trace", str(t1)])
    main(["run", "--scenario", line6_scn, "--seed", "1234", "--out-trace", str(t2)])
    assert t1.read_bytes() != t2.read_bytes()


def test_cmd_run_sweep(line6_scn, tmp_path, capsys):
    metrics = tmp_path / "sweep.csv"
    rc = main(["run", "--scenario", line6_scn, "--sweep", "4",
               "--out-metrics", str(metrics)])
    assert rc == 0
    with open(metrics) as fh:
        rows = list(csv.DictReader(fh))
    assert [r["seed"] for r in rows] == ["9", "10", "11", "12"]
    assert all(r["terminated"] == "1" for r in rows)


# -- check -----------------------------------------------------------------------


def test_cmd_check_fresh_trace(square_scn, tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    main(["run", "--scenario", square_scn, "--out-trace", str(trace)])
    capsys.readouterr()
    rc = main(["check", str(trace), "--scenario", square_scn])
    out = capsys.readouterr().out.strip().splitlines()
    assert rc == 0
    reports = [json.loads(line) for line in out]
    assert len(reports) == 8
    assert all(r["passed"] for r in reports)


def test_cmd_check_forged_trace_fails(square_scn, tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    main(["run", "--scenario", square_scn, "--out-trace", str(trace)])
    forged_lines = []
    for line in trace.read_text().splitlines():
        obj = json.loads(line)
        if obj["kind"] == "MoveEnd":
            obj["payload"]["at"] = [0.0, 1.0]  # lands on the top sightline
        forged_lines.append(json.dumps(obj))
    forged = tmp_path / "forged.jsonl"
    forged.write_text("\n".join(forged_lines) + "\n")
    capsys.readouterr()
    rc = main(["check", str(forged), "--scenario", square_scn])
    assert rc == 1
    reports = {json.loads(l)["check"]: json.loads(l) for l in capsys.readouterr().out.strip().splitlines()}
    assert not reports["no_new_collinearity"]["passed"]


def test_cmd_check_missing_trace(square_scn, capsys):
    rc = main(["check", "/nonexistent/trace.jsonl", "--scenario", square_scn])
    assert rc == 1


# -- render ----------------------------------------------------------------------


def test_cmd_render_two_frames(square_scn, tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    main(["run", "--scenario", square_scn, "--out-trace", str(trace)])
    out = tmp_path / "frames"
    rc = main(["render", str(trace), "--out-dir", str(out)])
    assert rc == 0
    files = sorted(p.name for p in out.glob("*.svg"))
    assert files == ["frame_0000.svg", "frame_0001.svg"]
    body = (out / "frame_0000.svg").read_text()
    assert "<svg" in body and "circle" in body


def test_cmd_render_final_only(square_scn, tmp_path):
    trace = tmp_path / "t.jsonl"
    main(["run", "--scenario", square_scn, "--out-trace", str(trace)])
    out = tmp_path / "final"
    assert main(["render", str(trace), "--out-dir", str(out), "--final-only"]) == 0
    assert len(list(out.glob("*.svg"))) == 1


def test_cmd_render_zero_move_trace(tmp_path):
    scn = write_scenario(
        tmp_path / "tri.json",
        {"positions": [[0, 0], [1, 0], [0.5, 0.9]],
         "params": {"scheduler": "sequential"}},
    )
    trace = tmp_path / "t.jsonl"
    main(["run", "--scenario", scn, "--out-trace", str(trace)])
    out = tmp_path / "frames"
    assert main(["render", str(trace), "--out-dir", str(out)]) == 0
    assert len(list(out.glob("*.svg"))) == 1
