"""Certified univalent inverse branches of iterated maps.

pull_back_univalent builds the branch of f^{-n} over a spherical disk D
that sends f^n(z0) back to z0, certifying univalence level by level:
at each pullback step the points being pulled back are enclosed in a
simply connected spherical disk that avoids every singular value of f,
so the inverse branch of f exists and is single-valued there.  Points
are transported by Newton continuation along in-disk geodesic paths.

The expansion bound theta is padded by the distortion constant of a
half-radius Koebe estimate, so disks of radius C/theta around the
anchor are honest enclosures of the branch image.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, NewtonDivergence, UnivalenceFailure
from .sphere import (SphericalDisk, disk_contains, is_inf, normalize_point,
                     rotation_from, rotation_to, spherical_distance,
                     spherical_distance_arr, disk_grid)
from .maps import orbit as forward_orbit

NEWTON_TOL = 1e-12
_MIN_STEP = 1e-5

CERT_UNIVALENT = "univalent"


def koebe_distortion(r: float) -> float:
    """Distortion bound ((1+r)/(1-r))^4 for univalent maps on the unit
    disk, evaluated at relative radius r in [0, 1)."""
    if not (0.0 <= r < 1.0):
        raise DomainError(f"relative radius must lie in [0, 1), got {r}")
    return ((1.0 + r) / (1.0 - r)) ** 4


# padding applied when the branch is only controlled on the half-radius
# subdisk of its certified domain
KOEBE_PAD = koebe_distortion(0.5)  # = 81

# enclosure constant: disks of radius C / theta (padded theta) about the
# anchor enclose the pulled-back half-disk
ENCLOSURE_C = KOEBE_PAD / 2.0


def _newton_solve(f, z, w, maxit=30):
    """Vectorized Newton for f(z) = w from the given guesses.

    Returns (z, ok) where ok marks points whose spherical residual
    dropped below NEWTON_TOL.
    """
    z = np.array(z, dtype=complex)
    for _ in range(maxit):
        fz = f.evaluate(z)
        bad = ~np.isfinite(fz) | ~np.isfinite(z)
        res = spherical_distance_arr(np.where(bad, 0, fz), w)
        res = np.where(bad, np.inf, res)
        active = (res > NEWTON_TOL) & ~bad
        if not active.any():
            break
        dz = np.zeros_like(z)
        fp = f.derivative_arr(np.where(active, z, 0))
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(fp != 0, (fz - w) / np.where(fp == 0, 1, fp), np.nan)
        dz = np.where(active, step, 0)
        dz = np.where(np.isfinite(dz), dz, 0)
        z = z - dz
    fz = f.evaluate(z)
    bad = ~np.isfinite(fz) | ~np.isfinite(z)
    res = np.where(bad, np.inf, spherical_distance_arr(np.where(bad, 0, fz), w))
    return z, res <= NEWTON_TOL


def _track(f, z_start, w_start, targets, path_center):
    """Pull targets back through one application of f.

    Each target w is joined to w_start by a geodesic-chart segment
    centered at path_center; the preimage is continued along the path
    by Newton's method with adaptive step halving, starting from
    z_start (a known preimage of w_start).
    """
    targets = np.asarray(targets, dtype=complex)
    m = targets.size
    back = rotation_from(path_center)
    fwd = rotation_to(path_center)
    s = complex(back(w_start))
    wt = np.asarray(back(targets), dtype=complex)

    z = np.full(m, complex(z_start), dtype=complex)
    t = np.zeros(m)
    h = np.full(m, 0.5)
    while np.any(t < 1.0):
        t_try = np.minimum(t + h, 1.0)
        w_path = np.asarray(fwd(s + t_try * (wt - s)), dtype=complex)
        z_try, ok = _newton_solve(f, z, w_path)
        adv = ok
        z = np.where(adv, z_try, z)
        t = np.where(adv, t_try, t)
        h = np.where(adv, np.minimum(h * 2.0, 0.5), h * 0.5)
        if np.any((h < _MIN_STEP) & (t < 1.0)):
            raise NewtonDivergence(
                "path continuation stalled while pulling back a sample")
    return z


class InverseBranch:
    """A certified univalent branch of f^{-n} over a spherical disk."""

    def __init__(self, f, n, base_disk, anchor, orbit_pts, regions,
                 levels, n_base):
        self.f = f
        self.n = n
        self.base_disk = base_disk
        self.anchor = normalize_point(anchor)
        self.orbit = orbit_pts
        self._regions = regions          # pullback region per step
        self._levels = levels            # sampled chains, levels[k] at time k
        self._n_base = n_base            # samples belonging to the base grid
        self.certificate = CERT_UNIVALENT

        # expansion sup of ||Df^n|| over the sampled base disk, by the
        # chain rule along each pulled-back chain (anchor chain included)
        logd = np.zeros(levels[0].size)
        for k in range(n):
            logd += np.log(f.spherical_derivative_arr(levels[k]))
        sel = np.concatenate([logd[:n_base], logd[-1:]])
        self.theta_raw = float(np.exp(np.max(sel)))
        self.lam_raw = 1.0 / self.theta_raw
        self.koebe_factor = KOEBE_PAD
        self.theta = KOEBE_PAD * self.theta_raw
        self.lam = self.lam_raw / KOEBE_PAD

    def __call__(self, w):
        return complex(self.transform(np.array([w]))[0])

    def transform(self, targets) -> np.ndarray:
        """Apply the branch to points of the base disk."""
        return self._pull(targets)[0]

    def transform_with_deriv(self, targets):
        """Branch values and log ||Dg|| (base-e) at each target."""
        return self._pull(targets)

    def _pull(self, targets):
        targets = np.asarray(targets, dtype=complex)
        for w in targets.ravel():
            if not disk_contains(self.base_disk, w):
                raise DomainError("target outside the certified base disk")
        ws = targets
        logdg = np.zeros(targets.size)
        for k in range(self.n - 1, -1, -1):
            ws = _track(self.f, self.orbit[k], self.orbit[k + 1], ws,
                        self.orbit[k + 1])
            logdg -= np.log(self.f.spherical_derivative_arr(ws))
        return ws, logdg

    def image_radius_bound(self) -> float:
        """Radius C/theta of the certified enclosure around the anchor."""
        return ENCLOSURE_C / self.theta

    def sampled_image(self):
        """The pulled-back base-grid samples (diagnostic)."""
        return self._levels[0][: self._n_base]

    def __repr__(self):
        return (f"InverseBranch(n={self.n}, anchor={self.anchor:.6g}, "
                f"theta={self.theta:.6g})")


def pull_back_univalent(f, n, base_disk, z0) -> InverseBranch:
    """Certified branch of f^{-n} on base_disk sending f^n(z0) to z0.

    Raises UnivalenceFailure(step) when the enclosure at some pullback
    step cannot be certified (too large, or it meets a singular value
    of f), NewtonDivergence if continuation stalls, DomainError for
    malformed inputs.
    """
    if n < 1:
        raise DomainError("need at least one pullback step")
    base_disk = SphericalDisk(normalize_point(base_disk.center), base_disk.radius)
    if base_disk.radius >= math.pi / 4:
        raise DomainError("base disk must have radius below pi/4 "
                          "(its double must be simply connected)")
    z0 = normalize_point(z0)
    orb, truncated = forward_orbit(f, z0, n)
    if truncated or len(orb) < n + 1:
        raise DomainError("orbit overflowed before reaching time n")
    if any(is_inf(p) for p in orb):
        raise DomainError("orbit passes through infinity; unsupported")
    if not disk_contains(base_disk, orb[n]):
        raise DomainError("base disk does not contain f^n(z0)")

    singular = f.singular_values()

    # samples: base grid, doubled-disk extras, then the orbit endpoint
    grid = disk_grid(base_disk, n_boundary=64, n_rings=5, pts_per_ring=5)
    n_base = grid.size
    doubled = base_disk.doubled()
    extra = disk_grid(doubled, n_boundary=32, n_rings=3, pts_per_ring=4)
    samples = np.concatenate([grid, extra, np.array([orb[n]], dtype=complex)])

    levels = [None] * (n + 1)
    levels[n] = samples
    regions = [None] * n
    region = doubled  # pullback region for step 1, known in advance
    for k in range(n - 1, -1, -1):
        step = n - k
        if region.radius >= math.pi / 2:
            raise UnivalenceFailure(step,
                f"enclosure of radius {region.radius:.3g} at step {step} "
                "is not simply connected")
        for s in singular:
            if spherical_distance(s, region.center) <= region.radius:
                raise UnivalenceFailure(step,
                    f"singular value {s} meets the step-{step} enclosure")
        regions[n - 1 - k] = region
        levels[k] = _track(f, orb[k], orb[k + 1], levels[k + 1], orb[k + 1])
        rad = 1.5 * float(np.max(spherical_distance_arr(
            levels[k], np.full(levels[k].shape, orb[k])))) + 1e-12
        region = SphericalDisk(orb[k], min(rad, math.pi * 0.999))

    return InverseBranch(f, n, base_disk, z0, orb, regions, levels, n_base)
