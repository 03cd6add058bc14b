import cmath
import math

import numpy as np
import pytest

from radialdim import (AffineBranch, ConformalIFS, DegenerateFit, DomainError,
                       InsufficientMass, NoQualifyingBranch, RationalMap,
                       SearchExhausted, box_counting, build_hyperbolic_ifs,
                       detect_radial, five_r_cover, limit_set_sample,
                       repelling_periodic_points, two_branch_construction,
                       verify_hyperbolic)
from radialdim.ifs import PLANAR
from radialdim.sphere import SphericalDisk, spherical_distance

Z2 = RationalMap([0, 0, 1], [1])
W0 = cmath.exp(1j)


# -- 5r covering ----------------------------------------------------------

def test_five_r_nested_keeps_biggest():
    balls = [(0.0j, 1.0), (0.1 + 0j, 0.2), (0.05j, 0.01)]
    sel = five_r_cover(balls)
    assert sel.selected == [0]


def test_five_r_chain():
    balls = [(complex(0.3 * k, 0), 0.2) for k in range(10)]
    sel = five_r_cover(balls)
    kept = [balls[i][0] for i in sel.selected]
    for i, a in enumerate(kept):
        for b in kept[i + 1:]:
            assert spherical_distance(a, b) > 0.4


def test_five_r_random_small():
    rng = np.random.default_rng(9)
    for _ in range(50):
        n = int(rng.integers(1, 60))
        balls = [(complex(*rng.normal(size=2)), float(rng.uniform(0.01, 0.5)))
                 for _ in range(n)]
        sel = five_r_cover(balls)  # the output is self-verified internally
        assert len(sel.selected) >= 1


# -- box counting ----------------------------------------------------------

def test_box_counting_preconditions():
    circle = np.exp(1j * np.linspace(0, 2 * math.pi, 2000, endpoint=False))
    with pytest.raises(DomainError):
        box_counting(circle[:500], np.geomspace(0.001, 0.2, 6))
    with pytest.raises(DomainError):
        box_counting(circle, np.geomspace(0.01, 0.2, 6))  # < 2 decades
    with pytest.raises(DomainError):
        box_counting(circle, np.geomspace(0.001, 0.2, 3))  # < 4 scales


def test_box_counting_circle():
    circle = np.exp(1j * np.linspace(0, 2 * math.pi, 10 ** 4, endpoint=False))
    est = box_counting(circle, np.geomspace(0.003, 0.31, 8))
    assert abs(est.t - 1.0) < 0.05
    with pytest.raises(DegenerateFit):
        box_counting(circle, np.geomspace(0.003, 0.31, 8),
                     residual_threshold=0.01)


@pytest.mark.xfail(strict=True, reason="10^4 points cannot support a "
                   "dimension-2 fit across the required two decades of "
                   "scales: the box count saturates at both ends of the "
                   "ladder and the slope lands near 1.7")
def test_box_counting_full_dimensional_cap():
    rng = np.random.default_rng(5)
    pts = (rng.random(10 ** 4) + 1j * rng.random(10 ** 4)) * 0.8 - (0.4 + 0.4j)
    est = box_counting(pts, np.geomspace(0.02, 2.0, 6))
    assert abs(est.t - 2.0) < 0.1


# -- build pipeline --------------------------------------------------------

def test_build_single_cert_insufficient_mass():
    # the fixed point 1 lands on itself at every time
    cert = detect_radial(Z2, 1.0 + 0j, 0.3, 5)
    D = SphericalDisk(1.0 + 0j, 0.25)
    with pytest.raises(InsufficientMass):
        build_hyperbolic_ifs(Z2, [cert], D, 0.5, 0.6)


def test_build_d_prime_zero_boundary():
    cert = detect_radial(Z2, 1.0 + 0j, 0.3, 5)
    D = SphericalDisk(1.0 + 0j, 0.25)
    res = build_hyperbolic_ifs(Z2, [cert], D, 0.0, 0.6)
    assert res.ifs.m == 1
    assert res.estimate.t == 0.0
    assert res.estimate.metadata["mass"] == 1.0


def test_build_no_qualifying_branch():
    cert = detect_radial(Z2, 1.0 + 0j, 0.3, 3)
    D = SphericalDisk(1.0 + 0j, 0.25)
    with pytest.raises(NoQualifyingBranch):
        # tiny delta pushes the expansion threshold out of reach
        build_hyperbolic_ifs(Z2, [cert], D, 0.0, 1e-4)
    with pytest.raises(DomainError):
        build_hyperbolic_ifs(Z2, [cert], D, 2.5, 0.6)


# -- periodic points and two-branch ----------------------------------------

def test_repelling_periodic_points_z2():
    region = SphericalDisk(cmath.exp(0.42j), 0.3)
    pts = repelling_periodic_points(Z2, 4, region)
    # e^{2 pi i/15} has period 4 under doubling, multiplier 2^4
    target = cmath.exp(2j * math.pi / 15)
    assert any(abs(z - target) < 1e-8 and abs(m - 16.0) < 1e-6
               for z, m in pts)
    assert all(m > 1.0 for _, m in pts)


def test_two_branch_z2():
    ifs = two_branch_construction(Z2, SphericalDisk(1.0 + 0j, 0.7), 5)
    assert ifs.m == 2
    rep = verify_hyperbolic(Z2, ifs, 2)
    assert rep.lambda_expansion > 1.0
    assert rep.invariance_defect < 1e-3
    assert rep.passed


def test_two_branch_exhausted_in_fatou_set():
    # z^2/4 has an attracting fixed point at 0; no repelling cycles nearby
    f = RationalMap([0, 0, 0.25], [1])
    with pytest.raises(SearchExhausted):
        two_branch_construction(f, SphericalDisk(0.0j, 0.3), 4)


# -- verification ----------------------------------------------------------

class TriplingMap:
    """Piecewise-expanding test double: x -> 3x on [0,1/2), 3x-2 on [1/2,1].

    The standard expanding map whose inverse branches generate the
    middle-thirds system; only the evaluate/derivative surface used by
    verify_hyperbolic is provided.
    """

    def evaluate(self, zs):
        zs = np.asarray(zs, dtype=complex)
        return np.where(zs.real < 0.5, 3.0 * zs, 3.0 * zs - 2.0)

    def __call__(self, z):
        return complex(self.evaluate(np.array([z]))[0])

    def derivative_arr(self, zs):
        return np.full(np.asarray(zs).shape, 3.0 + 0j)


def test_verify_middle_thirds():
    ifs = ConformalIFS(SphericalDisk(0.5 + 0j, 0.55),
                       [AffineBranch(1 / 3, 0.0), AffineBranch(1 / 3, 2 / 3)],
                       metric_mode=PLANAR)
    rep = verify_hyperbolic(TriplingMap(), ifs, 1)
    assert abs(rep.lambda_expansion - 3.0) < 1e-12
    assert rep.invariance_defect < 1e-12
    assert abs(rep.dimension_lower_bound.t - math.log(2) / math.log(3)) < 1e-9
    assert rep.passed


def test_verify_flags_broken_ifs():
    # halving branches are not inverse branches of the tripling map
    ifs = ConformalIFS(SphericalDisk(0.5 + 0j, 0.55),
                       [AffineBranch(0.5, 0.0), AffineBranch(0.5, 0.5)],
                       metric_mode=PLANAR, validate=False)
    rep = verify_hyperbolic(TriplingMap(), ifs, 2)
    assert not rep.passed
    assert rep.invariance_defect > 1e-3
