"""Batch front end: JSON scenario configs in, tables/CSV/plots out.

Usage:
    radialdim run scenario.json --out results/ [--threads N] [--cap WORDS]

Each scenario names a task (radial_scan, moran, pressure_dim,
build_hyperbolic, two_branch, box_count), a map literal where relevant,
task parameters, and an integer random seed.  Outputs are deterministic
given the config and seed: a plain-text summary, CSV data files
(formatted with %.12g, seed recorded in a header comment), and a PBM
scatter plot when the task yields a point set.  Exit status: 0 on
success, 2 on a config parse error, 3 when a task reports a documented
failure (InsufficientMass, SearchExhausted, ...); failures are also
written to error.json as a machine-readable record.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from .errors import ConfigParseError, RadialDimError
from .hyperdim import (box_counting, build_hyperbolic_ifs,
                       two_branch_construction, verify_hyperbolic)
from .ifs import (ifs_from_dict, limit_set_sample, moran_solve,
                  pressure_root, ENUM_CAP)
from .maps import parse_map
from .radial import detect_radial
from .sphere import SphericalDisk

_FLOAT = "%.12g"


# -- small output helpers -------------------------------------------------

def _write_csv(path, seed, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write("# seed=%d\n" % seed)
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                (_FLOAT % v) if isinstance(v, float) else str(v)
                for v in row) + "\n")


def _write_pbm(path, points, width=400, height=400):
    """ASCII portable-bitmap scatter of a finite point cloud."""
    pts = np.asarray(points, dtype=complex)
    pts = pts[np.isfinite(pts)]
    grid = np.zeros((height, width), dtype=int)
    if pts.size:
        re, im = pts.real, pts.imag
        lo_r, hi_r = float(np.min(re)), float(np.max(re))
        lo_i, hi_i = float(np.min(im)), float(np.max(im))
        pad_r = 0.05 * (hi_r - lo_r) + 1e-9
        pad_i = 0.05 * (hi_i - lo_i) + 1e-9
        lo_r, hi_r = lo_r - pad_r, hi_r + pad_r
        lo_i, hi_i = lo_i - pad_i, hi_i + pad_i
        cx = ((re - lo_r) / (hi_r - lo_r) * (width - 1)).astype(int)
        cy = ((hi_i - im) / (hi_i - lo_i) * (height - 1)).astype(int)
        grid[cy, cx] = 1
    with open(path, "w", newline="\n") as fh:
        fh.write("P1\n%d %d\n" % (width, height))
        for row in grid:
            fh.write("".join("1" if v else "0" for v in row) + "\n")


def _chart_flag(z):
    return 1 if abs(z) > 1.0 else 0


def _points_csv(path, seed, pts):
    _write_csv(path, seed, ["re", "im", "chart"],
               [(float(z.real), float(z.imag), _chart_flag(z))
                for z in np.asarray(pts, dtype=complex)])


def _disk_from(cfg, key):
    d = cfg[key]
    return SphericalDisk(complex(d["center"][0], d["center"][1]),
                         float(d["radius"]))


# -- task runners ----------------------------------------------------------

def _run_moran(cfg, outdir, seed, cap):
    ratios = [float(r) for r in cfg["ratios"]]
    t = moran_solve(ratios)
    _write_csv(os.path.join(outdir, "moran.csv"), seed,
               ["n_ratios", "t"], [(len(ratios), t)])
    return ["moran: t = %.6f from %d ratios" % (t, len(ratios))]


def _run_radial_scan(cfg, outdir, seed, cap):
    f = parse_map(cfg["map"])
    delta = float(cfg["delta"])
    n_max = int(cfg["n_max"])
    rows, lines = [], []
    total = 0
    for sd in cfg["seeds"]:
        z0 = complex(sd[0], sd[1])
        cert = detect_radial(f, z0, delta, n_max)
        total += len(cert.good_times)
        for n, br in cert.good_times:
            rows.append((float(z0.real), float(z0.imag), n,
                         float(br.theta), float(br.lam)))
    _write_csv(os.path.join(outdir, "radial_scan.csv"), seed,
               ["seed_re", "seed_im", "n", "theta", "lam"], rows)
    lines.append("radial_scan: %d seeds, %d good times, delta = %s"
                 % (len(cfg["seeds"]), total, _FLOAT % delta))
    return lines


def _run_pressure_dim(cfg, outdir, seed, cap):
    ifs = ifs_from_dict(cfg["ifs"])
    sched = [int(d) for d in cfg.get("depth_schedule", [2, 4, 6])]
    rows = []
    for d in sched:
        est = pressure_root(ifs, (d,), cap=cap)
        rows.append((d, float(est.t)))
    final = pressure_root(ifs, tuple(sched), cap=cap)
    _write_csv(os.path.join(outdir, "pressure_dim.csv"), seed,
               ["depth", "t"], rows)
    return ["pressure_dim: t = %.6f (uncertainty %.2e, depth %d)"
            % (final.t, final.tolerance, sched[-1])]


def _run_build_hyperbolic(cfg, outdir, seed, cap):
    f = parse_map(cfg["map"])
    D = _disk_from(cfg, "target_disk")
    delta_cert = float(cfg["delta_cert"])
    certs = [detect_radial(f, complex(sd[0], sd[1]), delta_cert, int(sd[2]))
             for sd in cfg["seeds"]]
    res = build_hyperbolic_ifs(f, certs, D, float(cfg["d_prime"]),
                               float(cfg["delta"]))
    rows = [(float(br.anchor.real), float(br.anchor.imag), br.n,
             float(br.theta), float(br.lam_raw))
            for br in res.ifs.branches]
    _write_csv(os.path.join(outdir, "branches.csv"), seed,
               ["anchor_re", "anchor_im", "n", "theta", "lam"], rows)
    pts = limit_set_sample(res.ifs, int(cfg.get("sample_depth", 2)), cap=cap)
    _points_csv(os.path.join(outdir, "points.csv"), seed, pts)
    _write_pbm(os.path.join(outdir, "plot.pbm"), pts)
    rep = verify_hyperbolic(f, res.ifs, 1)
    return ["build_hyperbolic: %d branches, mass = %.6f, t >= %s"
            % (res.ifs.m, res.estimate.metadata["mass"],
               _FLOAT % res.estimate.t),
            "verify: lambda = %.4g, defect = %.3g, passed = %s"
            % (rep.lambda_expansion, rep.invariance_defect, rep.passed)]


def _run_two_branch(cfg, outdir, seed, cap):
    f = parse_map(cfg["map"])
    U = _disk_from(cfg, "disk")
    ifs = two_branch_construction(f, U, int(cfg["search_depth"]))
    est = pressure_root(ifs, (1, 2), cap=cap)
    rows = [(float(br.anchor.real), float(br.anchor.imag), br.n,
             float(br.lam_raw)) for br in ifs.branches]
    _write_csv(os.path.join(outdir, "branches.csv"), seed,
               ["anchor_re", "anchor_im", "n", "lam"], rows)
    pts = limit_set_sample(ifs, int(cfg.get("sample_depth", 6)), cap=cap)
    _points_csv(os.path.join(outdir, "points.csv"), seed, pts)
    _write_pbm(os.path.join(outdir, "plot.pbm"), pts)
    return ["two_branch: pressure_root = %.6f with anchors (%s, %s)"
            % (est.t, _FLOAT % rows[0][0], _FLOAT % rows[1][0])]


def _run_box_count(cfg, outdir, seed, cap):
    ifs = ifs_from_dict(cfg["ifs"])
    pts = limit_set_sample(ifs, int(cfg["depth"]), cap=cap)
    sc = cfg["scales"]
    scales = np.geomspace(float(sc[0]), float(sc[1]), int(sc[2]))
    est = box_counting(pts, scales)
    rows = list(zip((float(s) for s in est.metadata["scales"]),
                    est.metadata["counts"]))
    _write_csv(os.path.join(outdir, "box_count.csv"), seed,
               ["scale", "boxes"], rows)
    _points_csv(os.path.join(outdir, "points.csv"), seed, pts)
    _write_pbm(os.path.join(outdir, "plot.pbm"), pts)
    return ["box_count: t = %.6f (residual %.3g) from %d points"
            % (est.t, est.tolerance, len(pts))]


_TASKS = {
    "moran": _run_moran,
    "radial_scan": _run_radial_scan,
    "pressure_dim": _run_pressure_dim,
    "build_hyperbolic": _run_build_hyperbolic,
    "two_branch": _run_two_branch,
    "box_count": _run_box_count,
}


# -- entry point -----------------------------------------------------------

def _load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigParseError("cannot read config %s: %s" % (path, exc))
    if not isinstance(cfg, dict):
        raise ConfigParseError("config root must be an object")
    task = cfg.get("task")
    if task not in _TASKS:
        raise ConfigParseError(
            "unknown task %r; expected one of %s"
            % (task, sorted(_TASKS)))
    if not isinstance(cfg.get("seed", 0), int):
        raise ConfigParseError("seed must be an integer")
    return cfg


def run_scenario(path, outdir, cap=ENUM_CAP):
    """Execute one scenario config; returns the summary lines."""
    cfg = _load_config(path)
    os.makedirs(outdir, exist_ok=True)
    seed = int(cfg.get("seed", 0))
    np.random.seed(seed % (2 ** 32))
    try:
        lines = _TASKS[cfg["task"]](cfg, outdir, seed, cap)
    except ConfigParseError:
        raise
    except KeyError as exc:
        raise ConfigParseError("missing config key %s" % exc)
    except RadialDimError as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        with open(os.path.join(outdir, "error.json"), "w") as fh:
            json.dump(record, fh, indent=2, sort_keys=True)
            fh.write("\n")
        raise
    header = ["# task=%s seed=%d" % (cfg["task"], seed)]
    with open(os.path.join(outdir, "summary.txt"), "w", newline="\n") as fh:
        for ln in header + lines:
            fh.write(ln + "\n")
    return lines


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="radialdim",
        description="radial Julia sets, certified inverse branches, and "
                    "conformal-IFS dimension bounds")
    sub = ap.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run a scenario config")
    runp.add_argument("config", help="path to a JSON scenario")
    runp.add_argument("--out", default=".", help="output directory")
    runp.add_argument("--threads", type=int, default=1,
                      help="worker count (accepted for compatibility; "
                           "orchestration is single-threaded)")
    runp.add_argument("--cap", type=int, default=ENUM_CAP,
                      help="word-enumeration cap for pressure tasks")
    args = ap.parse_args(argv)
    try:
        lines = run_scenario(args.config, args.out, cap=args.cap)
    except ConfigParseError as exc:
        print(json.dumps({"error": "ConfigParseError",
                          "message": str(exc)}), file=sys.stderr)
        return 2
    except RadialDimError as exc:
        print(json.dumps({"error": type(exc).__name__,
                          "message": str(exc)}), file=sys.stderr)
        return 3
    for ln in lines:
        print(ln)
    return 0


if __name__ == "__main__":
    sys.exit(main())
