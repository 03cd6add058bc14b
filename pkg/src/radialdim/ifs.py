"""Finite conformal iterated function systems.

A ConformalIFS is a simply connected ambient disk V together with
finitely many univalent contractions carrying V into pairwise disjoint
subdomains.  Words over the branch alphabet are plain tuples of branch
indices.  The module computes limit-set samples, the Moran equation,
the finite-depth pressure function and its root.

Two metric modes: "Spherical" (the default, derivatives in the round
metric) and "PlanarEuclidean" (affine test systems, where the textbook
similarity formulas are exact).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (BracketFailure, DomainError, EnumerationOverflow,
                     InsufficientMass)
from .sphere import (SphericalDisk, disk_grid, spherical_distance,
                     spherical_distance_arr)

SPHERICAL = "Spherical"
PLANAR = "PlanarEuclidean"

ENUM_CAP = 10 ** 6


@dataclass
class DimensionEstimate:
    """A dimension value with its provenance."""

    t: float
    method: str  # MoranRoot | PressureRoot | BoxCounting | MassLowerBound
    depth: int
    tolerance: float
    metadata: dict = field(default_factory=dict)


class AffineBranch:
    """Planar similarity g(z) = a z + b with |a| < 1 (testing mode)."""

    def __init__(self, a, b):
        a, b = complex(a), complex(b)
        if not (0.0 < abs(a) < 1.0):
            raise DomainError("affine branch must be a strict contraction")
        self.a = a
        self.b = b
        self.contraction_ratio = abs(a)

    def transform(self, zs):
        return self.a * np.asarray(zs, dtype=complex) + self.b

    def transform_with_deriv(self, zs):
        zs = np.asarray(zs, dtype=complex)
        return self.a * zs + self.b, np.full(zs.size, math.log(abs(self.a)))

    def __repr__(self):
        return f"AffineBranch(a={self.a}, b={self.b})"


def _branch_ratio(br):
    # certified contraction: unpadded 1/theta_raw for dynamical branches
    if hasattr(br, "contraction_ratio"):
        return br.contraction_ratio
    return br.lam_raw


class ConformalIFS:
    """Ambient disk plus contracting branches with disjoint images."""

    def __init__(self, domain: SphericalDisk, branches, metric_mode=SPHERICAL,
                 validate=True, margin=0.0):
        if not branches:
            raise DomainError("need at least one branch")
        if metric_mode not in (SPHERICAL, PLANAR):
            raise DomainError(f"unknown metric mode {metric_mode!r}")
        self.domain = domain
        self.branches = list(branches)
        self.metric_mode = metric_mode
        self.ratios = [float(_branch_ratio(b)) for b in self.branches]
        for lam in self.ratios:
            if not (0.0 < lam < 1.0):
                raise DomainError(f"branch contraction {lam} outside (0,1)")
        if validate:
            self._validate(margin)

    @property
    def m(self):
        return len(self.branches)

    def _dist(self, a, b):
        if self.metric_mode == PLANAR:
            return abs(complex(a) - complex(b))
        return spherical_distance(a, b)

    def _image_hull(self, br):
        """Sampled bounding disk (center, radius) of br(domain)."""
        grid = disk_grid(self.domain, n_boundary=32, n_rings=3, pts_per_ring=4)
        img = br.transform(grid)
        c = complex(np.mean(img))
        if self.metric_mode == PLANAR:
            r = float(np.max(np.abs(img - c)))
        else:
            r = float(np.max(spherical_distance_arr(img, np.full(img.shape, c))))
        return c, 1.05 * r + 1e-12

    def _validate(self, margin):
        hulls = [self._image_hull(b) for b in self.branches]
        for j, (c, r) in enumerate(hulls):
            if self._dist(c, self.domain.center) + r + margin >= self.domain.radius:
                raise DomainError(
                    f"image of branch {j} is not compactly inside the domain")
        for i in range(len(hulls)):
            for j in range(i + 1, len(hulls)):
                ci, ri = hulls[i]
                cj, rj = hulls[j]
                if self._dist(ci, cj) <= ri + rj:
                    raise DomainError(
                        f"images of branches {i} and {j} are not disjoint")
        self._hulls = hulls


# -- Moran equation -----------------------------------------------------

def moran_sum(lambdas, t):
    lam = np.asarray(lambdas, dtype=float)
    return float(np.sum(lam ** t))


def moran_solve(lambdas) -> float:
    """The unique t >= 0 with sum(lambda_j^t) = 1, by bisection."""
    lam = np.asarray(lambdas, dtype=float)
    if lam.size == 0:
        raise DomainError("empty ratio list")
    if np.any((lam <= 0.0) | (lam >= 1.0)):
        raise DomainError("all ratios must lie strictly in (0, 1)")
    if lam.size == 1:
        return 0.0
    lo, hi = 0.0, 1.0
    while moran_sum(lam, hi) > 1.0:
        hi *= 2.0
        if hi > 1e6:
            raise DomainError("Moran root not bracketed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if moran_sum(lam, mid) > 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16 * (1.0 + hi):
            break
    t = 0.5 * (lo + hi)
    if abs(moran_sum(lam, t) - 1.0) > 1e-12:
        # extremely flat sums can stall bisection; refine by Newton
        for _ in range(5):
            s = moran_sum(lam, t)
            ds = float(np.sum(lam ** t * np.log(lam)))
            t -= (s - 1.0) / ds
    return t


def mass_check(lambdas, t) -> bool:
    """True iff sum(lambda_j^t) >= 1 (the dimension lower-bound test)."""
    lam = np.asarray(lambdas, dtype=float)
    if lam.size == 0:
        raise DomainError("empty ratio list")
    if np.any((lam <= 0.0) | (lam >= 1.0)):
        raise DomainError("all ratios must lie strictly in (0, 1)")
    if t < 0:
        raise DomainError("exponent must be nonnegative")
    return moran_sum(lam, t) >= 1.0


# -- pressure -----------------------------------------------------------

def _logsumexp(a):
    a = np.asarray(a, dtype=float)
    hi = np.max(a)
    if not np.isfinite(hi):
        return hi
    return float(hi + np.log(np.sum(np.exp(a - hi))))


def word_log_derivs(ifs: ConformalIFS, depth: int, z0=None, cap=ENUM_CAP):
    """log ||Dg_w(z0)|| for every depth-`depth` word w, by the chain rule.

    Arrays grow by a factor m per level; raises EnumerationOverflow past
    the word cap.
    """
    if depth < 1:
        raise DomainError("depth must be at least 1")
    if ifs.m ** depth > cap:
        raise EnumerationOverflow(
            f"{ifs.m}^{depth} words exceed the cap of {cap}")
    z0 = ifs.domain.center if z0 is None else complex(z0)
    pts = np.array([z0], dtype=complex)
    ld = np.zeros(1)
    for _ in range(depth):
        new_pts, new_ld = [], []
        for br in ifs.branches:
            q, dq = br.transform_with_deriv(pts)
            new_pts.append(q)
            new_ld.append(ld + dq)
        pts = np.concatenate(new_pts)
        ld = np.concatenate(new_ld)
    return pts, ld


def pressure(ifs: ConformalIFS, t: float, depth: int, z0=None, cap=ENUM_CAP,
             sample_size=None, seed=0):
    """Depth-n pressure P_n(t) = (1/n) log sum_w ||Dg_w(z0)||^t.

    Exact enumeration up to the word cap; beyond it, uniform word
    sampling is used when sample_size is given, and the function returns
    (estimate, standard_error) instead of a plain float.
    """
    if ifs.m ** depth <= cap:
        _, ld = word_log_derivs(ifs, depth, z0, cap)
        return _logsumexp(t * ld) / depth
    if sample_size is None:
        raise EnumerationOverflow(
            f"{ifs.m}^{depth} words exceed the cap; pass sample_size to sample")
    rng = np.random.default_rng(seed)
    z0 = ifs.domain.center if z0 is None else complex(z0)
    words = rng.integers(0, ifs.m, size=(sample_size, depth))
    vals = np.empty(sample_size)
    pts = np.full(sample_size, z0, dtype=complex)
    ld = np.zeros(sample_size)
    for k in range(depth - 1, -1, -1):
        for j in range(ifs.m):
            sel = words[:, k] == j
            if not sel.any():
                continue
            q, dq = ifs.branches[j].transform_with_deriv(pts[sel])
            pts[sel] = q
            ld[sel] += dq
    vals = np.exp(t * ld)
    mean = float(np.mean(vals))
    est = (depth * math.log(ifs.m) + math.log(mean)) / depth
    stderr = float(np.std(vals, ddof=1) / math.sqrt(sample_size) / mean / depth)
    return est, stderr


def pressure_root(ifs: ConformalIFS, depth_schedule=(2, 4, 6), tol=1e-9,
                  z0=None, cap=ENUM_CAP) -> DimensionEstimate:
    """Zero of the depth-n pressure in t, bracketed on [0, 2].

    The word log-derivatives are enumerated once per scheduled depth;
    the bisection in t then costs only vector re-weighting.  The
    reported uncertainty is the spread between the two deepest levels.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    schedule = sorted(set(int(d) for d in depth_schedule))
    if not schedule or schedule[0] < 1:
        raise DomainError("depth schedule must contain positive depths")
    roots = []
    for depth in schedule:
        _, ld = word_log_derivs(ifs, depth, z0, cap)

        def p_of(t):
            return _logsumexp(t * ld) / depth

        if ifs.m == 1:
            # single branch: P(0) = 0 exactly; the infimum root is 0
            roots.append(0.0)
            continue
        p0, p2 = p_of(0.0), p_of(2.0)
        if p0 < 0.0 or p2 > 0.0:
            raise BracketFailure(
                f"pressure not bracketed on [0,2] at depth {depth}: "
                f"P(0)={p0:.3g}, P(2)={p2:.3g}")
        if p0 <= p_of(1.0):
            raise BracketFailure("pressure is not decreasing at probe points")
        lo, hi = 0.0, 2.0
        while hi - lo > max(tol * 0.1, 1e-15):
            mid = 0.5 * (lo + hi)
            if p_of(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    spread = abs(roots[-1] - roots[-2]) if len(roots) > 1 else tol
    return DimensionEstimate(
        t=roots[-1], method="PressureRoot", depth=schedule[-1],
        tolerance=max(spread, tol),
        metadata={"depth_schedule": schedule, "roots": roots,
                  "metric_mode": ifs.metric_mode})


def limit_set_sample(ifs: ConformalIFS, depth: int, z0=None, cap=ENUM_CAP,
                     with_words=False):
    """Images of the base point under all depth-n words (the standard
    depth-n approximation of the limit set)."""
    if depth == 0:
        z0 = ifs.domain.center if z0 is None else complex(z0)
        pts = np.array([z0], dtype=complex)
        return (pts, [()]) if with_words else pts
    if ifs.m ** depth > cap:
        raise EnumerationOverflow(
            f"{ifs.m}^{depth} words exceed the cap of {cap}")
    z0 = ifs.domain.center if z0 is None else complex(z0)
    pts = np.array([z0], dtype=complex)
    words = [()]
    for _ in range(depth):
        new_pts, new_words = [], []
        for j, br in enumerate(ifs.branches):
            new_pts.append(br.transform(pts))
            new_words.extend((j,) + w for w in words)
        pts = np.concatenate(new_pts)
        words = new_words
    return (pts, words) if with_words else pts


# -- serialization ------------------------------------------------------

def ifs_to_dict(ifs: ConformalIFS, map_literal=None) -> dict:
    """JSON-compatible description (ambient disk, mode, branches)."""
    branches = []
    for br in ifs.branches:
        if isinstance(br, AffineBranch):
            branches.append({"kind": "affine",
                             "a": [br.a.real, br.a.imag],
                             "b": [br.b.real, br.b.imag]})
        else:
            bd = br.base_disk
            branches.append({"kind": "pullback",
                             "map": map_literal,
                             "depth": br.n,
                             "anchor": [br.anchor.real, br.anchor.imag],
                             "base_disk": {"center": [bd.center.real,
                                                      bd.center.imag],
                                           "radius": bd.radius}})
    return {"domain": {"center": [ifs.domain.center.real,
                                  ifs.domain.center.imag],
                       "radius": ifs.domain.radius},
            "metric_mode": ifs.metric_mode,
            "branches": branches}


def ifs_from_dict(doc: dict) -> ConformalIFS:
    from .branch import pull_back_univalent
    from .maps import parse_map

    dom = SphericalDisk(complex(*doc["domain"]["center"]),
                        float(doc["domain"]["radius"]))
    branches = []
    for spec in doc["branches"]:
        if spec["kind"] == "affine":
            branches.append(AffineBranch(complex(*spec["a"]),
                                         complex(*spec["b"])))
        elif spec["kind"] == "pullback":
            f = parse_map(spec["map"])
            bd = SphericalDisk(complex(*spec["base_disk"]["center"]),
                               float(spec["base_disk"]["radius"]))
            branches.append(pull_back_univalent(f, int(spec["depth"]), bd,
                                                complex(*spec["anchor"])))
        else:
            raise DomainError(f"unknown branch kind {spec['kind']!r}")
    return ConformalIFS(dom, branches,
                        metric_mode=doc.get("metric_mode", SPHERICAL))
