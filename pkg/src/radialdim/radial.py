"""Detection of radial orbit behaviour.

A starting point is "radial at scale delta" along its orbit when, for
many times n, the disk of radius 2*delta around f^n(z0) pulls back
univalently along the orbit to a neighbourhood of z0.  detect_radial
records every such time up to a cutoff together with the certified
inverse branch; disk_of_univalence then picks a disk around a cluster
point of the good-time iterates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .branch import InverseBranch, pull_back_univalent
from .errors import (DomainError, InsufficientData, NewtonDivergence,
                     UnivalenceFailure)
from .maps import orbit as forward_orbit
from .sphere import SphericalDisk, normalize_point, spherical_distance

# how many good times count as "infinitely many" for finite purposes
DEFAULT_MIN_GOOD_TIMES = 10


@dataclass
class RadialCertificate:
    """Good pullback times along one orbit, with their branches."""

    z0: complex
    delta: float
    good_times: list = field(default_factory=list)  # (n, InverseBranch)
    limit_disk: SphericalDisk | None = None

    @property
    def times(self):
        return [n for n, _ in self.good_times]

    def base_points(self):
        """f^n(z0) for each good time (the branch base-disk centers)."""
        return [br.base_disk.center for _, br in self.good_times]


def detect_radial(f, z0, delta, n_max) -> RadialCertificate:
    """Certify every n <= n_max at which the doubled disk around f^n(z0)
    pulls back univalently to z0.  An empty result is a valid negative."""
    z0 = normalize_point(z0)
    if not (0.0 < delta and 2.0 * delta < math.pi / 4):
        raise DomainError(
            "delta must be small enough that the doubled pullback disk "
            "(radius 4*delta) stays simply connected")
    orb, truncated = forward_orbit(f, z0, n_max)
    cert = RadialCertificate(z0=z0, delta=delta)
    for n in range(1, min(n_max, len(orb) - 1) + 1):
        base = SphericalDisk(orb[n], 2.0 * delta)
        try:
            br = pull_back_univalent(f, n, base, z0)
        except (UnivalenceFailure, NewtonDivergence, DomainError):
            continue
        cert.good_times.append((n, br))
    return cert


def disk_of_univalence(cert: RadialCertificate,
                       min_good_times=DEFAULT_MIN_GOOD_TIMES) -> SphericalDisk:
    """A disk around a cluster point of the good-time iterates.

    The iterates f^n(z0) over good times are binned into spherical
    cells of diameter delta/4 (cells centered on the iterates
    themselves); the fullest cell wins, ties broken by the earliest
    time.  The returned radius sits just below delta/2, so the disk and
    its double are both simply connected for the deltas admitted by
    detect_radial.
    """
    if len(cert.good_times) < min_good_times:
        raise InsufficientData(
            f"need at least {min_good_times} good times, "
            f"have {len(cert.good_times)}")
    pts = cert.base_points()
    cell_radius = cert.delta / 8.0  # cells of diameter delta/4
    best_idx, best_count = 0, -1
    for i, c in enumerate(pts):
        count = sum(1 for p in pts if spherical_distance(c, p) <= cell_radius)
        if count > best_count:
            best_idx, best_count = i, count
    center = pts[best_idx]
    radius = 0.5 * cert.delta * (1.0 - 1e-9)
    disk = SphericalDisk(center, radius)
    cert.limit_disk = disk
    return disk


def times_landing_in(cert: RadialCertificate, disk: SphericalDisk):
    """Good times whose iterate f^n(z0) lies in the given disk."""
    return [n for (n, br) in cert.good_times
            if spherical_distance(br.base_disk.center, disk.center)
            < disk.radius]
