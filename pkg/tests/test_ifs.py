import cmath
import math

import numpy as np
import pytest

from radialdim import (AffineBranch, BracketFailure, ConformalIFS,
                       DomainError, EnumerationOverflow, RationalMap,
                       ifs_from_dict, ifs_to_dict, limit_set_sample,
                       mass_check, moran_solve, moran_sum, pressure,
                       pressure_root, pull_back_univalent)
from radialdim.ifs import PLANAR, SPHERICAL
from radialdim.sphere import SphericalDisk

LN2_LN3 = math.log(2.0) / math.log(3.0)


def middle_thirds():
    branches = [AffineBranch(1 / 3, 0.0), AffineBranch(1 / 3, 2 / 3)]
    dom = SphericalDisk(0.5 + 0j, 0.55)
    return ConformalIFS(dom, branches, metric_mode=PLANAR)


def arc_ifs(depth=6, radius=0.3, window=0.19):
    f = RationalMap([0, 0, 1], [1])
    w0 = cmath.exp(1j)
    anchors = [cmath.exp(1j * (1 + 2 * math.pi * j) / 2 ** depth)
               for j in range(2 ** depth)
               if abs((1 + 2 * math.pi * j) / 2 ** depth - 1.0) < window]
    base = SphericalDisk(w0, 2 * radius)
    brs = [pull_back_univalent(f, depth, base, a) for a in anchors]
    return ConformalIFS(SphericalDisk(w0, radius), brs)


def test_affine_branch():
    g = AffineBranch(0.25 + 0.1j, 1.0)
    pts = np.array([0.0, 1.0, 1j])
    img, logd = g.transform_with_deriv(pts)
    assert np.allclose(img, (0.25 + 0.1j) * pts + 1.0)
    assert np.allclose(logd, math.log(abs(0.25 + 0.1j)))
    assert abs(g.contraction_ratio - abs(0.25 + 0.1j)) < 1e-15


def test_ifs_validation():
    dom = SphericalDisk(0.5 + 0j, 0.55)
    with pytest.raises(DomainError):
        # overlapping images
        ConformalIFS(dom, [AffineBranch(0.6, 0.0), AffineBranch(0.6, 0.4)],
                     metric_mode=PLANAR)
    with pytest.raises(DomainError):
        # image escapes the domain
        ConformalIFS(dom, [AffineBranch(0.5, 0.9)], metric_mode=PLANAR)
    ifs = middle_thirds()
    assert ifs.m == 2
    assert np.allclose(ifs.ratios, [1 / 3, 1 / 3])


def test_moran_oracles():
    assert abs(moran_solve([1 / 3, 1 / 3]) - LN2_LN3) < 1e-9
    assert abs(moran_solve([0.5, 0.5]) - 1.0) < 1e-12
    assert moran_solve([0.7]) == 0.0
    assert abs(moran_sum([0.5, 0.5], 1.0) - 1.0) < 1e-15
    assert mass_check([0.5, 0.5], 1.0)  # boundary sum = 1 accepted
    assert not mass_check([0.4], 0.5)
    with pytest.raises(DomainError):
        moran_solve([])
    with pytest.raises(DomainError):
        moran_solve([1.2])


def test_pressure_exact_on_similarities():
    ifs = middle_thirds()
    for n in (1, 5, 10):
        for t in (0.0, 0.5, LN2_LN3, 1.0):
            p = pressure(ifs, t, n)
            assert abs(p - math.log(2.0 * 3.0 ** -t)) < 1e-10
    est = pressure_root(ifs, (2, 4, 6))
    assert abs(est.t - moran_solve(ifs.ratios)) < 1e-9


def test_pressure_monotone_in_t():
    ifs = middle_thirds()
    vals = [pressure(ifs, t, 4) for t in (0.0, 0.4, 0.8, 1.2)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_pressure_sampling_mode():
    ifs = middle_thirds()
    est, stderr = pressure(ifs, 0.5, 30, sample_size=2000, seed=123)
    exact = math.log(2.0 * 3.0 ** -0.5)
    assert stderr >= 0.0
    assert abs(est - exact) < 1e-8  # all words share one log-derivative
    # deterministic under the same seed
    est2, stderr2 = pressure(ifs, 0.5, 30, sample_size=2000, seed=123)
    assert est == est2 and stderr == stderr2


def test_enumeration_cap():
    ifs = middle_thirds()
    with pytest.raises(EnumerationOverflow):
        pressure(ifs, 0.5, 50)
    with pytest.raises(EnumerationOverflow):
        limit_set_sample(ifs, 50)


def test_single_branch_root_is_zero():
    dom = SphericalDisk(0.0j, 0.55)
    ifs = ConformalIFS(dom, [AffineBranch(0.5, 0.1)], metric_mode=PLANAR)
    assert pressure_root(ifs, (2, 4)).t == 0.0


def test_bracket_failure_on_weak_contraction():
    # ratios so close to 1 that P(2) > 0; only constructible unvalidated
    dom = SphericalDisk(0.0j, 0.55)
    ifs = ConformalIFS(dom, [AffineBranch(0.9, 0.0), AffineBranch(0.9, 0.01)],
                       metric_mode=PLANAR, validate=False)
    with pytest.raises(BracketFailure):
        pressure_root(ifs, (2,))


def test_limit_set_sample_words():
    ifs = middle_thirds()
    pts, words = limit_set_sample(ifs, 3, z0=0.0, with_words=True)
    assert len(pts) == 8 and len(words) == 8
    for z, w in zip(pts, words):
        # word[0] is the outermost branch applied last
        x = 0.0
        for j in reversed(w):
            x = x / 3 + (0.0 if j == 0 else 2 / 3)
        assert abs(z - x) < 1e-12
    assert len(limit_set_sample(ifs, 0)) == 1


def test_pressure_root_on_arc_system():
    ifs = arc_ifs()
    est = pressure_root(ifs, (1, 2), tol=1e-8)
    # three exact-2^6 branches: root of 3 * 2^(-6t) = 1, up to distortion
    ideal = math.log(3.0) / (6 * math.log(2.0))
    assert abs(est.t - ideal) < 0.02
    assert est.method == "PressureRoot"


def test_serialization_roundtrip():
    ifs = middle_thirds()
    doc = ifs_to_dict(ifs)
    back = ifs_from_dict(doc)
    assert back.m == 2 and back.metric_mode == PLANAR
    assert np.allclose(back.ratios, ifs.ratios)

    arc = arc_ifs(depth=4, window=0.25)
    doc = ifs_to_dict(arc, map_literal="rational: (0,0,1)/(1)")
    back = ifs_from_dict(doc)
    assert back.m == arc.m and back.metric_mode == SPHERICAL
    z = cmath.exp(1.05j)
    for b1, b2 in zip(arc.branches, back.branches):
        assert abs(complex(b1(z)) - complex(b2(z))) < 1e-10
