import json
import math
import os

import pytest

from radialdim.cli import main, run_scenario

MT_IFS = {
    "domain": {"center": [0.5, 0.0], "radius": 0.55},
    "metric_mode": "PlanarEuclidean",
    "branches": [
        {"kind": "affine", "a": [1 / 3, 0.0], "b": [0.0, 0.0]},
        {"kind": "affine", "a": [1 / 3, 0.0], "b": [2 / 3, 0.0]},
    ],
}


def _write(tmp_path, name, cfg):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_moran_scenario(tmp_path, capsys):
    cfg = _write(tmp_path, "m.json", {"task": "moran", "seed": 7,
                                      "ratios": [1 / 3, 1 / 3]})
    out = tmp_path / "out"
    assert main(["run", cfg, "--out", str(out)]) == 0
    assert "t = 0.630930" in capsys.readouterr().out
    summary = (out / "summary.txt").read_text()
    assert summary.startswith("# task=moran seed=7\n")
    csv = (out / "moran.csv").read_text().splitlines()
    assert csv[0] == "# seed=7" and csv[1] == "n_ratios,t"


def test_malformed_configs_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    assert main(["run", str(bad), "--out", str(tmp_path / "o1")]) == 2
    cfg = _write(tmp_path, "t.json", {"task": "unknown"})
    assert main(["run", cfg, "--out", str(tmp_path / "o2")]) == 2
    cfg = _write(tmp_path, "m.json", {"task": "moran"})  # missing ratios
    assert main(["run", cfg, "--out", str(tmp_path / "o3")]) == 2
    err = capsys.readouterr().err
    assert "ConfigParseError" in err


def test_task_error_record(tmp_path, capsys):
    cfg = _write(tmp_path, "b.json", {
        "task": "build_hyperbolic", "seed": 0,
        "map": "rational: (0,0,1)/(1)",
        "seeds": [[1.0, 0.0, 5]], "delta_cert": 0.3,
        "target_disk": {"center": [1.0, 0.0], "radius": 0.25},
        "d_prime": 0.5, "delta": 0.6})
    out = tmp_path / "out"
    assert main(["run", cfg, "--out", str(out)]) == 3
    record = json.loads((out / "error.json").read_text())
    assert record["error"] == "InsufficientMass"
    assert json.loads(capsys.readouterr().err)["error"] == "InsufficientMass"


def test_pressure_dim_and_box_count(tmp_path, capsys):
    cfg = _write(tmp_path, "p.json", {"task": "pressure_dim", "seed": 3,
                                      "ifs": MT_IFS,
                                      "depth_schedule": [2, 4, 6]})
    out = tmp_path / "pd"
    assert main(["run", cfg, "--out", str(out)]) == 0
    rows = (out / "pressure_dim.csv").read_text().splitlines()
    assert rows[1] == "depth,t"
    assert len(rows) == 5
    t_final = float(rows[-1].split(",")[1])
    assert abs(t_final - math.log(2) / math.log(3)) < 1e-6

    cfg = _write(tmp_path, "bc.json", {"task": "box_count", "seed": 1,
                                       "ifs": MT_IFS, "depth": 12,
                                       "scales": [1e-4, 1.1e-2, 6]})
    out2 = tmp_path / "bc"
    assert main(["run", cfg, "--out", str(out2)]) == 0
    assert "box_count: t = 0.6" in capsys.readouterr().out
    assert (out2 / "plot.pbm").read_text().startswith("P1\n")
    pts = (out2 / "points.csv").read_text().splitlines()
    assert pts[1] == "re,im,chart"
    assert len(pts) == 2 + 2 ** 12


def test_radial_scan(tmp_path):
    cfg = _write(tmp_path, "r.json", {
        "task": "radial_scan", "seed": 11, "map": "rational: (0,0,1)/(1)",
        "seeds": [[math.cos(1.0), math.sin(1.0)], [0.0, 0.0]],
        "delta": 0.3, "n_max": 6})
    out = tmp_path / "rs"
    lines = run_scenario(cfg, str(out))
    assert "2 seeds, 6 good times" in lines[0]
    rows = (out / "radial_scan.csv").read_text().splitlines()
    assert len(rows) == 2 + 6  # the origin contributes nothing


def test_two_branch_scenario_deterministic(tmp_path):
    cfg = _write(tmp_path, "tb.json", {
        "task": "two_branch", "seed": 42, "map": "rational: (0,0,1)/(1)",
        "disk": {"center": [1.0, 0.0], "radius": 0.7},
        "search_depth": 5, "sample_depth": 6})
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["run", cfg, "--out", str(out1)]) == 0
    assert main(["run", cfg, "--out", str(out2)]) == 0
    for name in ("branches.csv", "points.csv", "plot.pbm", "summary.txt"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
