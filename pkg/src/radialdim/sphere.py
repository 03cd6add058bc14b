"""Geometry of the Riemann sphere.

Points of the extended complex plane are plain ``complex`` values; the
point at infinity is the canonical constant ``INF``.  All distances are
great-circle distances in the round metric of curvature +1, so the
sphere has diameter pi and the unit circle |z| = 1 is an equator.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

INF = complex(math.inf, 0.0)

# |z| beyond this is numerically indistinguishable from infinity
_HUGE = 1e150


def is_inf(z) -> bool:
    return cmath.isinf(complex(z))


def normalize_point(z) -> complex:
    """Canonical representative: any infinite value collapses to INF."""
    z = complex(z)
    if cmath.isinf(z) or abs(z) > _HUGE:
        return INF
    return z


def invert(z) -> complex:
    """The rigid rotation z -> 1/z of the sphere (swaps 0 and INF)."""
    z = normalize_point(z)
    if is_inf(z):
        return 0j
    if z == 0:
        return INF
    return 1.0 / z


def antipode(z) -> complex:
    z = normalize_point(z)
    if is_inf(z):
        return 0j
    if z == 0:
        return INF
    return -1.0 / z.conjugate()


def spherical_distance(a, b) -> float:
    """Great-circle distance in [0, pi].

    tan(d/2) = |a - b| / |1 + conj(a) b|; computed through the 1/z chart
    when both points are outside the unit disk, so no overflow occurs.
    """
    a = normalize_point(a)
    b = normalize_point(b)
    ainf, binf = is_inf(a), is_inf(b)
    if ainf and binf:
        return 0.0
    if ainf:
        return 2.0 * math.atan2(1.0, abs(b))
    if binf:
        return 2.0 * math.atan2(1.0, abs(a))
    if abs(a) > 1.0 and abs(b) > 1.0:
        a, b = 1.0 / a, 1.0 / b
    return 2.0 * math.atan2(abs(a - b), abs(1.0 + a.conjugate() * b))


def spherical_distance_arr(a, b) -> np.ndarray:
    """Vectorized spherical_distance for complex ndarrays."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    a, b = np.broadcast_arrays(a, b)
    ainf = ~np.isfinite(a)
    binf = ~np.isfinite(b)
    aa = np.where(ainf, 0.0, a)
    bb = np.where(binf, 0.0, b)
    swap = (np.abs(aa) > 1.0) & (np.abs(bb) > 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        aa = np.where(swap, np.where(aa != 0, 1.0 / np.where(aa == 0, 1, aa), 0), aa)
        bb = np.where(swap, np.where(bb != 0, 1.0 / np.where(bb == 0, 1, bb), 0), bb)
    num = np.abs(aa - bb)
    den = np.abs(1.0 + np.conj(aa) * bb)
    d = 2.0 * np.arctan2(num, den)
    # patch infinite-point cases
    d = np.where(ainf & binf, 0.0, d)
    d = np.where(ainf & ~binf, 2.0 * np.arctan2(1.0, np.abs(bb)), d)
    d = np.where(binf & ~ainf, 2.0 * np.arctan2(1.0, np.abs(aa)), d)
    return d


@dataclass(frozen=True)
class SphericalDisk:
    """Open metric disk on the sphere; radius is great-circle length."""

    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", normalize_point(self.center))
        if not (0.0 < self.radius < math.pi):
            raise DomainError(
                f"disk radius must lie in (0, pi), got {self.radius}")

    @property
    def simply_connected(self) -> bool:
        # hemisphere threshold on the round sphere
        return self.radius < math.pi / 2

    def doubled(self) -> "SphericalDisk":
        return SphericalDisk(self.center, 2.0 * self.radius)


def disk_contains(disk: SphericalDisk, p) -> bool:
    return spherical_distance(disk.center, p) < disk.radius


def disk_contains_disk(outer: SphericalDisk, inner: SphericalDisk, margin=0.0) -> bool:
    """closure(inner) inside outer, with optional extra margin."""
    d = spherical_distance(outer.center, inner.center)
    return d + inner.radius + margin < outer.radius


def disk_separation(d1: SphericalDisk, d2: SphericalDisk) -> bool:
    """True iff the closures of the two disks are disjoint."""
    return spherical_distance(d1.center, d2.center) > d1.radius + d2.radius


def rotation_to(c):
    """Mobius rotation of the sphere taking 0 to c, as a callable on arrays."""
    c = normalize_point(c)
    if is_inf(c):
        def mob(z):
            z = np.asarray(z, dtype=complex)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.where(z == 0, np.inf + 0j, 1.0 / np.where(z == 0, 1, z))
            return out
        return mob

    cc = c.conjugate()

    def mob(z):
        z = np.asarray(z, dtype=complex)
        den = 1.0 - cc * z
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(den == 0, np.inf + 0j, (z + c) / np.where(den == 0, 1, den))
        return out

    return mob


def rotation_from(c):
    """Inverse of rotation_to(c): takes c to 0."""
    c = normalize_point(c)
    if is_inf(c):
        return rotation_to(INF)  # involution

    cc = c.conjugate()

    def mob(z):
        z = np.asarray(z, dtype=complex)
        den = 1.0 + cc * z
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(den == 0, np.inf + 0j, (z - c) / np.where(den == 0, 1, den))
        return out

    return mob


def disk_point(disk: SphericalDisk, rho: float, phi: float) -> complex:
    """Point at great-circle distance rho, direction phi, from the center."""
    tau = math.tan(rho / 2.0)
    z = complex(rotation_to(disk.center)(tau * cmath.exp(1j * phi)))
    return normalize_point(z)


def disk_grid(disk: SphericalDisk, n_boundary=64, n_rings=5, pts_per_ring=5,
              boundary_frac=0.999) -> np.ndarray:
    """Deterministic sample grid: boundary circle plus interior rings."""
    mob = rotation_to(disk.center)
    taus = []
    tb = math.tan(disk.radius * boundary_frac / 2.0)
    for k in range(n_boundary):
        phi = 2.0 * math.pi * k / n_boundary
        taus.append(tb * cmath.exp(1j * phi))
    for r in range(1, n_rings + 1):
        rho = disk.radius * r / (n_rings + 1)
        tr = math.tan(rho / 2.0)
        for k in range(pts_per_ring):
            phi = 2.0 * math.pi * (k + 0.5 * r) / pts_per_ring
            taus.append(tr * cmath.exp(1j * phi))
    return np.asarray(mob(np.array(taus, dtype=complex)), dtype=complex)


def geodesic_path(disk: SphericalDisk, start, targets, t):
    """Points at parameter t in [0, 1] along in-disk paths start -> targets.

    Paths are straight segments in the rotated chart centered at the disk
    center; both endpoints inside the disk keep the whole path inside
    (the chart image of a hemisphere-or-smaller disk is a round disk).
    """
    back = rotation_from(disk.center)
    fwd = rotation_to(disk.center)
    s = np.asarray(back(start), dtype=complex)
    w = np.asarray(back(np.asarray(targets, dtype=complex)), dtype=complex)
    return np.asarray(fwd(s + t * (w - s)), dtype=complex)


def to_xyz(z) -> np.ndarray:
    """Embedding into the unit 2-sphere in R^3 (used for cell counting)."""
    z = normalize_point(z)
    if is_inf(z):
        return np.array([0.0, 0.0, 1.0])
    r2 = abs(z) ** 2
    s = 1.0 / (1.0 + r2)
    return np.array([2.0 * z.real * s, 2.0 * z.imag * s, (r2 - 1.0) * s])


def to_xyz_arr(zs) -> np.ndarray:
    zs = np.asarray(zs, dtype=complex)
    out = np.empty(zs.shape + (3,))
    fin = np.isfinite(zs)
    zf = np.where(fin, zs, 0)
    r2 = np.abs(zf) ** 2
    s = 1.0 / (1.0 + r2)
    out[..., 0] = 2.0 * zf.real * s
    out[..., 1] = 2.0 * zf.imag * s
    out[..., 2] = (r2 - 1.0) * s
    out[~fin] = (0.0, 0.0, 1.0)
    return out
