import math

import numpy as np
import pytest

from zollgap.bumps import (
    BumpFunction,
    OddBumpSum,
    bump_eval,
    chord_vs_diameter_gap,
    diameter_integral,
    f_eval,
)
from zollgap.finesets import certify_fine_set, generate_perturbed_tetrahedron
from zollgap.geometry import (
    GeodesicSegment,
    SpherePoint,
    UnitTangent,
    antipode,
    direction_at,
    half_circle,
    tangent_frame,
)
from zollgap.quadrature import integrate_along


@pytest.fixture(scope="module")
def fine_set():
    return certify_fine_set(generate_perturbed_tetrahedron(42, 0.1))


@pytest.fixture(scope="module")
def odd_sum(fine_set):
    return OddBumpSum(fine_set, fine_set.epsilon_sigma / 2)


def chord_at_impact(center: SpherePoint, eps: float, rho: float,
                    azimuth: float = 0.0, shrink: float = 1.0):
    """The boundary-to-boundary chord of B(center, eps) at impact parameter rho.

    Built on the great circle through the equator point at ``azimuth`` whose
    closest approach to the center is rho (at arc position pi/2); the chord
    is the sub-arc inside the ball, optionally shrunk toward its midpoint.
    """
    assert rho < eps
    e1, e2 = tangent_frame(center)
    u = math.cos(azimuth) * e1 + math.sin(azimuth) * e2
    w = np.cross(center.coords, u)
    base = SpherePoint(u)
    t = math.cos(rho) * center.coords + math.sin(rho) * w
    alpha = math.acos(min(1.0, math.cos(eps) / math.cos(rho)))
    s0 = math.pi / 2 - shrink * alpha
    start = SpherePoint(math.cos(s0) * u + math.sin(s0) * t)
    vel = -math.sin(s0) * u + math.cos(s0) * t
    return GeodesicSegment(UnitTangent(start, vel), 2 * shrink * alpha)


class TestBumpFunction:
    def test_center_value_one(self):
        for eps in (0.01, 0.1, 0.5):
            b = BumpFunction(SpherePoint([0.2, -0.4, 0.9]), eps)
            assert bump_eval(b, b.center) == pytest.approx(1.0, abs=1e-15)

    def test_boundary_value_zero(self):
        b = BumpFunction(SpherePoint([0, 0, 1]), 0.2)
        q = SpherePoint([math.sin(0.2), 0.0, math.cos(0.2)])
        assert bump_eval(b, q) == 0.0
        far = SpherePoint([1, 0, 0])
        assert bump_eval(b, far) == 0.0

    def test_half_radius_value(self):
        # substitute d = eps/2 into the profile: exp(1/eps - 2/eps) = exp(-1/eps)
        eps = 0.35
        b = BumpFunction(SpherePoint([0, 0, 1]), eps)
        q = SpherePoint([math.sin(eps / 2), 0.0, math.cos(eps / 2)])
        assert bump_eval(b, q) == pytest.approx(math.exp(-1.0 / eps), rel=1e-10)

    def test_range(self):
        b = BumpFunction(SpherePoint([0, 0, 1]), 0.4)
        rng = np.random.default_rng(1)
        pts = rng.normal(size=(2000, 3))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        vals = b(pts)
        assert np.all(vals >= 0.0) and np.all(vals <= 1.0)

    def test_smooth_decay_at_boundary(self):
        # the profile and its first two arclength derivatives vanish
        # approaching the support boundary (finite differences)
        eps = 0.3
        b = BumpFunction(SpherePoint([0, 0, 1]), eps)
        h = 1e-3
        for d0 in (eps - 5e-3, eps - 2e-3):
            grid = d0 + h * np.arange(-2, 3)
            v = b.radial_profile(grid)
            first = (v[3] - v[1]) / (2 * h)
            second = (v[3] - 2 * v[2] + v[1]) / h**2
            assert abs(v[2]) < 1e-6
            assert abs(first) < 1e-6
            assert abs(second) < 1e-6


class TestOddBumpSum:
    def test_center_values(self, fine_set, odd_sum):
        for p in fine_set.points_array():
            assert f_eval(odd_sum, SpherePoint(p)) == pytest.approx(-1.0, abs=1e-12)
            assert f_eval(odd_sum, SpherePoint(-p)) == pytest.approx(1.0, abs=1e-12)

    def test_outside_supports_zero(self, fine_set, odd_sum):
        rng = np.random.default_rng(2)
        pts = rng.normal(size=(500, 3))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        centers = np.vstack([fine_set.points_array(), -fine_set.points_array()])
        d = np.arccos(np.clip(pts @ centers.T, -1, 1)).min(axis=1)
        outside = pts[d > odd_sum.eps]
        assert np.all(odd_sum(outside) == 0.0)

    def test_oddness(self, odd_sum):
        rng = np.random.default_rng(3)
        pts = rng.normal(size=(100_000, 3))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        assert np.max(np.abs(odd_sum(pts) + odd_sum(-pts))) < 1e-14

    def test_value_range(self, odd_sum):
        rng = np.random.default_rng(4)
        pts = rng.normal(size=(5000, 3))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        vals = odd_sum(pts)
        assert np.all(vals >= -1.0) and np.all(vals <= 1.0)

    def test_eps_validation(self, fine_set):
        with pytest.raises(ValueError):
            OddBumpSum(fine_set, fine_set.epsilon_sigma * 1.5)
        with pytest.raises(ValueError):
            OddBumpSum(fine_set, 0.0)

    def test_great_circle_integrals_vanish(self, odd_sum):
        rng = np.random.default_rng(5)
        for _ in range(200):
            p = SpherePoint(rng.normal(size=3))
            v = UnitTangent(p, rng.normal(size=3))
            circle = GeodesicSegment(v, 2 * math.pi)
            assert abs(integrate_along(odd_sum, circle)) < 1e-10

    def test_half_circle_antisymmetry(self, odd_sum):
        # reversing base point and direction through the antipodal map flips
        # the half-circle integral's sign
        rng = np.random.default_rng(6)
        for _ in range(100):
            p = SpherePoint(rng.normal(size=3))
            v = UnitTangent(p, rng.normal(size=3))
            tau = half_circle(v)
            tau_m = half_circle(UnitTangent(antipode(p), -np.asarray(v.dir)))
            a = integrate_along(odd_sum, tau)
            b = integrate_along(odd_sum, tau_m)
            assert abs(a + b) < 1e-10


class TestChordVsDiameter:
    def test_diameter_gap_zero(self):
        b = BumpFunction(SpherePoint([0.3, 0.1, 0.94]), 0.25)
        chord = chord_at_impact(b.center, b.eps, 0.0, azimuth=0.7, shrink=0.8)
        assert abs(chord_vs_diameter_gap(b, chord)) < 1e-9

    def test_offset_chord_positive_gap(self):
        b = BumpFunction(SpherePoint([0, 0, 1]), 0.2)
        chord = chord_at_impact(b.center, b.eps, 0.1)
        gap = chord_vs_diameter_gap(b, chord)
        # quadrature oracle on both integrals (the chord already runs
        # boundary to boundary, so no extension mass is missing)
        direct = diameter_integral(b) - integrate_along(b, chord)
        assert gap > 0.0
        assert gap == pytest.approx(direct, abs=1e-12)

    def test_random_chords_nonnegative(self):
        rng = np.random.default_rng(7)
        b = BumpFunction(SpherePoint([0, 0, 1]), 0.3)
        for _ in range(1000):
            rho = rng.uniform(0.0, 0.29)
            chord = chord_at_impact(
                b.center, b.eps, rho, azimuth=rng.uniform(0, 2 * math.pi)
            )
            gap = chord_vs_diameter_gap(b, chord)
            assert gap >= -1e-9
            if rho > 1e-3:
                assert gap > 0.0

    def test_chord_outside_ball_rejected(self):
        b = BumpFunction(SpherePoint([0, 0, 1]), 0.1)
        chord = GeodesicSegment(
            UnitTangent(SpherePoint([1, 0, 0]), [0, 1, 0]), 1.0
        )
        with pytest.raises(ValueError):
            chord_vs_diameter_gap(b, chord)

    def test_chord_bounded_by_matching_diameter_segment(self):
        # a chord of arc half-length l satisfies d(center, chord(t)) >= eps - t
        # from either boundary endpoint, so its integral is at most twice the
        # profile integral over the outermost band [eps - l, eps]
        b = BumpFunction(SpherePoint([0, 0, 1]), 0.25)
        rng = np.random.default_rng(8)
        for _ in range(50):
            rho = rng.uniform(0.01, 0.24)
            chord = chord_at_impact(b.center, b.eps, rho)
            half_len = chord.length / 2
            u = np.linspace(0.0, half_len, 4001)
            upper = 2.0 * np.trapezoid(b.radial_profile(b.eps - u), u)
            assert integrate_along(b, chord) <= upper + 1e-9
