"""Constructive lower bounds on hyperbolic dimension.

The pipeline: radial certificates supply expanding inverse branches;
branches whose expansion clears a threshold are anchored at their
radial points, disjointified with a greedy 5r covering selection, and
assembled into a conformal IFS over a common disk whose limit set
carries the dimension lower bound tested by the mass inequality.

Also here: an independent box-counting estimator used as a
cross-check, and a small two-branch construction giving a positive
lower bound from any disk meeting the repelling dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .branch import ENCLOSURE_C, pull_back_univalent
from .errors import (DegenerateFit, DomainError, InsufficientMass,
                     NewtonDivergence, NoQualifyingBranch, SearchExhausted,
                     UnivalenceFailure)
from .ifs import (PLANAR, ConformalIFS, DimensionEstimate, limit_set_sample,
                  mass_check, moran_solve, moran_sum)
from .maps import RationalMap
from .sphere import (SphericalDisk, spherical_distance,
                     spherical_distance_arr, to_xyz_arr)


# -- 5r covering --------------------------------------------------------

@dataclass
class CoveringSelection:
    input_balls: list                 # (center, radius) pairs
    selected: list                    # indices into input_balls
    expansion: float = 5.0


def five_r_cover(balls) -> CoveringSelection:
    """Greedy Vitali selection: sort by radius descending, keep each
    ball disjoint from all previously kept ones.  The output is checked
    against its own contract (disjointness; every input center within
    5r of a kept ball) before returning."""
    balls = [(complex(c), float(r)) for c, r in balls]
    for _, r in balls:
        if r <= 0:
            raise DomainError("ball radii must be positive")
    order = sorted(range(len(balls)),
                   key=lambda i: (-balls[i][1], balls[i][0].real,
                                  balls[i][0].imag))
    selected = []
    for i in order:
        ci, ri = balls[i]
        if all(spherical_distance(ci, balls[j][0]) > ri + balls[j][1]
               for j in selected):
            selected.append(i)
    sel = CoveringSelection(input_balls=balls, selected=selected)
    _check_covering(sel)
    return sel


def _check_covering(sel: CoveringSelection):
    balls, selected = sel.input_balls, sel.selected
    for a in range(len(selected)):
        for b in range(a + 1, len(selected)):
            ci, ri = balls[selected[a]]
            cj, rj = balls[selected[b]]
            assert spherical_distance(ci, cj) > ri + rj, \
                "covering selection produced overlapping balls"
    for i, (c, _) in enumerate(balls):
        ok = any(spherical_distance(c, balls[j][0])
                 <= sel.expansion * balls[j][1] for j in selected)
        assert ok, f"center of input ball {i} escapes the 5r expansion"


# -- box counting -------------------------------------------------------

def box_counting(points, scales, residual_threshold=0.75) -> DimensionEstimate:
    """Least-squares box dimension of a spherical point cloud.

    Points are binned, per scale eps, into cells of a latitude-ring
    grid (rings of height eps, longitude bins of width eps/sin).  The
    slope of log N(eps) against log(1/eps) is the estimate; a large
    regression residual raises DegenerateFit.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.size < 10 ** 3:
        raise DomainError("need at least 1000 points")
    scales = np.sort(np.asarray(scales, dtype=float))[::-1]
    if scales.size < 4 or scales[0] / scales[-1] < 100.0:
        raise DomainError("need >= 4 scales spanning >= 2 decades")
    xyz = to_xyz_arr(pts)
    colat = np.arccos(np.clip(xyz[:, 2], -1.0, 1.0))
    lon = np.arctan2(xyz[:, 1], xyz[:, 0])
    counts = []
    for eps in scales:
        n_rings = max(1, int(math.ceil(math.pi / eps)))
        ring = np.minimum((colat / (math.pi / n_rings)).astype(int),
                          n_rings - 1)
        mid = (ring + 0.5) * (math.pi / n_rings)
        circ = 2.0 * math.pi * np.sin(mid)
        nbins = np.maximum(1, np.ceil(circ / eps).astype(int))
        b = np.minimum(((lon + math.pi) / (2.0 * math.pi) * nbins).astype(int),
                       nbins - 1)
        counts.append(len(set(zip(ring.tolist(), b.tolist()))))
    x = np.log(1.0 / scales)
    y = np.log(np.asarray(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    if resid > residual_threshold:
        raise DegenerateFit(
            f"box-count regression residual {resid:.3g} exceeds "
            f"{residual_threshold}")
    return DimensionEstimate(
        t=float(slope), method="BoxCounting", depth=len(scales),
        tolerance=resid,
        metadata={"scales": scales.tolist(), "counts": counts,
                  "residual": resid})


# -- main pipeline ------------------------------------------------------

@dataclass
class BuildResult:
    ifs: ConformalIFS
    estimate: DimensionEstimate
    covering: CoveringSelection
    branches_considered: int = 0


def build_hyperbolic_ifs(f, certs, D: SphericalDisk, d_prime: float,
                         delta: float) -> BuildResult:
    """Assemble an IFS over D from radial certificates and check the
    dimension-d_prime mass inequality.

    From each certificate, the earliest good time whose branch clears
    the expansion threshold 10 C / delta and whose anchor (the radial
    point) sits inside D with its enclosure ball is taken; the balls
    D(anchor, C/theta) are disjointified by five_r_cover; the surviving
    branches must satisfy sum(lambda_j^d_prime) >= 1.
    """
    if not (0.0 <= d_prime < 2.0):
        raise DomainError("d_prime must lie in [0, 2)")
    if delta <= 0:
        raise DomainError("delta must be positive")
    threshold = 10.0 * ENCLOSURE_C / delta
    candidates = []
    for cert in certs:
        for n, br in sorted(cert.good_times):
            if br.theta <= threshold:
                continue
            ball_r = ENCLOSURE_C / br.theta
            da = spherical_distance(br.anchor, D.center)
            if da >= D.radius:
                continue
            if da + 1.2 * ball_r >= D.radius:
                continue  # enclosure ball would poke out of D
            bd = br.base_disk
            if (spherical_distance(bd.center, D.center) + D.radius
                    >= bd.radius):
                continue  # branch not defined on all of D
            candidates.append(br)
            break
    if not candidates:
        raise NoQualifyingBranch(
            f"no branch with padded expansion above {threshold:.3g} "
            "anchored inside the target disk")
    balls = [(br.anchor, ENCLOSURE_C / br.theta) for br in candidates]
    covering = five_r_cover(balls)
    chosen = [candidates[i] for i in covering.selected]
    lams = [br.lam_raw for br in chosen]
    total = moran_sum(lams, d_prime)
    if not mass_check(lams, d_prime):
        raise InsufficientMass(
            f"sum lambda^{d_prime} = {total:.4g} < 1 with "
            f"{len(chosen)} branches; need more radial points or a "
            "smaller exponent")
    ifs = ConformalIFS(D, chosen)
    est = DimensionEstimate(
        t=d_prime, method="MassLowerBound",
        depth=max(br.n for br in chosen), tolerance=0.0,
        metadata={"mass": total, "branches": len(chosen),
                  "threshold": threshold, "enclosure_constant": ENCLOSURE_C})
    return BuildResult(ifs=ifs, estimate=est, covering=covering,
                       branches_considered=len(candidates))


# -- two-branch construction ---------------------------------------------

def repelling_periodic_points(f: RationalMap, k: int, region: SphericalDisk):
    """Repelling points of period dividing k inside the region, with
    multiplier moduli.

    Found by Newton on f^k(z) - z seeded from a grid over the region
    (composing f^k symbolically blows up in degree and coefficient
    size long before k reaches useful search depths).  Root-polishing
    to residual ~1e-12, then clustering of duplicates.
    """
    from .sphere import disk_grid as _grid
    seeds = np.concatenate([_grid(region, n_boundary=40, n_rings=8,
                                  pts_per_ring=12),
                            np.array([region.center], dtype=complex)])
    z = seeds.astype(complex)
    for _ in range(60):
        w = z.copy()
        dfk = np.ones_like(z)
        bad = np.zeros(z.shape, dtype=bool)
        for _ in range(k):
            dfk = dfk * f.derivative_arr(w)
            w = f.evaluate(w)
            bad |= ~np.isfinite(w)
        h = w - z
        hp = dfk - 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where((hp != 0) & ~bad, h / np.where(hp == 0, 1, hp), 0)
        step = np.where(np.isfinite(step), step, 0)
        if np.max(np.abs(step)) < 1e-13:
            break
        z = z - step
    out = []
    for z0 in z:
        if not np.isfinite(z0):
            continue
        # verify: genuine period-k preimage with small residual
        w, mod, ok = complex(z0), 1.0, True
        for _ in range(k):
            mod *= f.spherical_derivative(w)
            w = f(w)
            if not np.isfinite(w):
                ok = False
                break
        if not ok or spherical_distance(w, z0) > 1e-9:
            continue
        if mod > 1.0 + 1e-9:
            out.append((complex(z0), mod))
    dedup = []
    for z0, mod in out:
        if not any(abs(z0 - p) < 1e-7 * (1 + abs(p)) for p, _ in dedup):
            dedup.append((z0, mod))
    return dedup


def two_branch_construction(f, U: SphericalDisk,
                            search_depth: int) -> ConformalIFS:
    """A two-branch IFS over U from repelling periodic points inside U.

    Periodic points of period k <= search_depth are enumerated exactly
    (roots of f^k(z) - z); each repelling one inside U is tried as the
    anchor of a univalent pullback of U; the first pair of branches
    with disjoint images compactly inside U wins.
    """
    if not isinstance(f, RationalMap):
        raise DomainError("periodic-point search needs a rational map")
    candidates = []
    seen = []
    for k in range(1, search_depth + 1):
        pts = repelling_periodic_points(f, k, U)
        pts.sort(key=lambda pm: (np.angle(pm[0]), pm[0].real, pm[0].imag))
        for z, mod in pts:
            if spherical_distance(z, U.center) >= U.radius:
                continue
            if any(spherical_distance(z, s) < 1e-8 for s in seen):
                continue  # lower-period point rediscovered at a multiple
            seen.append(z)
            try:
                br = pull_back_univalent(f, k, U, z)
            except (UnivalenceFailure, NewtonDivergence, DomainError):
                continue
            candidates.append(br)
    for i in range(len(candidates)):
        for j in range(i + 1, len(candidates)):
            try:
                return ConformalIFS(U, [candidates[i], candidates[j]])
            except DomainError:
                continue
    raise SearchExhausted(
        f"no two disjoint univalent self-islands in U up to period "
        f"{search_depth} ({len(candidates)} candidate branches)")


# -- verification --------------------------------------------------------

@dataclass
class HyperbolicSetReport:
    sample: np.ndarray
    n: int
    lambda_expansion: float
    invariance_defect: float
    dimension_lower_bound: DimensionEstimate
    passed: bool = True
    metadata: dict = field(default_factory=dict)


def verify_hyperbolic(f, ifs: ConformalIFS, depth: int) -> HyperbolicSetReport:
    """Sample-level check that the IFS limit set is an expanding,
    forward-invariant set for f.

    The limit-set sample plus all of its forward iterates (up to each
    word's total iteration count) form the candidate set S; the report
    gives the smallest ||Df^N|| over the word samples and the largest
    distance from f(S) to S.  A report with lambda <= 1 or a big defect
    is a failed verification, not an exception.
    """
    planar = ifs.metric_mode == PLANAR
    # Base the sample at the fixed point of branch 0.  It lies on the
    # limit set exactly and is periodic under f, so the sampled set plus
    # its forward iterates closes up instead of dangling at an arbitrary
    # base point.
    base = getattr(ifs.branches[0], "anchor", None)
    if base is None:
        base = ifs.domain.center
    g0 = ifs.branches[0].transform
    for _ in range(64):
        base = complex(g0(np.array([base], dtype=complex))[0])
    samples, words = limit_set_sample(ifs, depth, z0=base, with_words=True)
    branch_depths = [getattr(br, "n", 1) for br in ifs.branches]

    chain_pts = []
    lam_min = math.inf
    for z, w in zip(samples, words):
        n_w = sum(branch_depths[j] for j in w)
        p = complex(z)
        logd = 0.0
        for _ in range(n_w):
            if planar:
                logd += math.log(abs(complex(f.derivative_arr(
                    np.array([p]))[0])))
            else:
                logd += math.log(f.spherical_derivative(p))
            chain_pts.append(p)
            p = f(p)
        chain_pts.append(p)
        if n_w > 0:
            lam_min = min(lam_min, math.exp(logd))
    S = np.array(chain_pts, dtype=complex)
    fS = f.evaluate(S)
    defect = 0.0
    for lo in range(0, fS.size, 512):
        blk = fS[lo:lo + 512]
        if planar:
            dmat = np.abs(blk[:, None] - S[None, :])
        else:
            dmat = spherical_distance_arr(blk[:, None], S[None, :])
        defect = max(defect, float(np.max(np.min(dmat, axis=1))))

    dim = DimensionEstimate(
        t=moran_solve(ifs.ratios), method="MoranRoot", depth=depth,
        tolerance=1e-12, metadata={"ratios": list(ifs.ratios)})
    n_rep = max(sum(branch_depths[j] for j in w) for w in words) if words else 0
    ok = lam_min > 1.0 and defect < 1e-3
    return HyperbolicSetReport(
        sample=samples, n=n_rep, lambda_expansion=float(lam_min),
        invariance_defect=defect, dimension_lower_bound=dim, passed=ok,
        metadata={"set_size": int(S.size), "base_point": [base.real,
                                                          base.imag]})
