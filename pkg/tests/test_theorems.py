import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from newton_horizon import (SI, AtOrAboveEscape, BadParameters, BallUnion, BoundFrame,
                            Criterion, DegenerateSupport, DomainExceeded, IntegrationOptions,
                            NotContaining, PointMass, RadialProfile, State, Termination,
                            UniformBall, VoxelGrid, WrongShape, classify_black_hole,
                            collapse_time, confinement_distance_from_extent,
                            confinement_distance_general, confinement_radius_spherical,
                            cosmology_K, cosmology_report, escape_speed_lower_bound,
                            escape_speed_spherical, integrate, parabolic_radial, potential,
                            radial_apex)

from conftest import UNIT, radial_apex_oracle

EARTH_M, EARTH_R = 5.972e24, 6.371e6


def test_escape_speed_values():
    assert escape_speed_spherical(1.0, 2.0, UNIT) == 1.0
    # sqrt(2 * 6.67430e-11 * 5.972e24 / 6.371e6)
    assert escape_speed_spherical(EARTH_M, EARTH_R) == pytest.approx(1.1186e4, rel=1e-4)
    assert escape_speed_spherical(3.0, 4 * 5.0, UNIT) == pytest.approx(
        0.5 * escape_speed_spherical(3.0, 5.0, UNIT))


@pytest.mark.parametrize("factor, outcome", [(0.999, Termination.COLLAPSED), (1.001, Termination.ESCAPED)])
def test_earth_escape_speed_by_integration(factor, outcome):
    earth = UniformBall([0, 0, 0], EARTH_R, EARTH_M)
    v = factor * escape_speed_spherical(EARTH_M, EARTH_R)
    start = State.at([EARTH_R * (1 + 1e-9), 0, 0], [v, 0, 0])
    traj = integrate(earth, start, IntegrationOptions(t_end=1e10))
    assert traj.termination is outcome


def test_confinement_radius_examples():
    b = confinement_radius_spherical(1.0, 1.0, 1.0, UNIT)
    assert b.eta == 0.5 and b.radius_bound == 2.0
    assert b.frame is BoundFrame.SPHERICAL_FROM_CENTER
    assert confinement_radius_spherical(1.0, 3.0, 0.0, UNIT).radius_bound == pytest.approx(3.0)
    with pytest.raises(AtOrAboveEscape):
        confinement_radius_spherical(1.0, 1.0, math.sqrt(2.0), UNIT)


def test_confinement_radius_reached_by_radial_ode():
    # G = M = R = 1, |v0|^2 = 1  ->  gamma = 2, eta = 0.5, bound 2
    assert radial_apex_oracle(1.0, 2.0, 0.5) == pytest.approx(2.0, rel=1e-9)


def test_parabolic_radial_examples():
    assert parabolic_radial(1.7, 2.0, 1, 0.0) == pytest.approx(1.7)
    assert parabolic_radial(1.7, 2.0, -1, 0.0) == pytest.approx(1.7)
    assert parabolic_radial(1.0, 1.0, 1, 2.0) == pytest.approx(4 ** (2 / 3), rel=1e-15)
    assert collapse_time(1.0, 1.0) == pytest.approx(2 / 3)
    assert collapse_time(1.0, 1.0, 0.25) == pytest.approx((2 / 3) * 0.875)
    with pytest.raises(DomainExceeded):
        parabolic_radial(1.0, 1.0, -1, 0.7)
    with pytest.raises(DomainExceeded):
        parabolic_radial(1.0, 1.0, -1, 0.6, r=0.25)
    with pytest.raises(BadParameters):
        parabolic_radial(1.0, 1.0, 0, 0.1)


def test_parabolic_radial_solves_its_ode():
    from scipy.integrate import solve_ivp
    sol = solve_ivp(lambda t, y: [math.sqrt(1.0 / y[0])], (0, 2.0), [1.0],
                    rtol=1e-12, atol=1e-14, dense_output=True)
    ts = np.linspace(0, 2.0, 9)
    np.testing.assert_allclose(parabolic_radial(1.0, 1.0, 1, ts), sol.sol(ts)[0], rtol=1e-9)


def test_radial_apex_examples():
    assert radial_apex(1.0, 2.0, 0.5) == 2.0
    assert radial_apex(1.0, 2.0, 0.5) == confinement_radius_spherical(1, 1, 1, UNIT).radius_bound
    assert radial_apex(3.0, 2.0, 2.0 / 6.0) == pytest.approx(3.0)
    with pytest.raises(BadParameters):
        radial_apex(1.0, 2.0, 1.5)
    with pytest.raises(BadParameters):
        radial_apex(1.0, 2.0, 0.0)


@settings(max_examples=1000, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(0.0, 0.999))
def test_optimality_pair_identity(M, R, frac):
    v = frac * math.sqrt(2 * M / R)
    b = confinement_radius_spherical(M, R, v, UNIT)
    apex = radial_apex(R, 2 * M, b.eta)
    assert apex == pytest.approx(b.radius_bound, rel=1e-12)
    assert b.radius_bound == pytest.approx(R / (1 - R * v * v / (2 * M)), rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.0, 0.98), st.floats(1e-4, 0.01))
def test_bound_increases_with_speed(M, R, frac, step):
    esc = math.sqrt(2 * M / R)
    a = confinement_radius_spherical(M, R, frac * esc, UNIT).radius_bound
    b = confinement_radius_spherical(M, R, (frac + step) * esc, UNIT).radius_bound
    assert b > a >= R * (1 - 1e-15)


def test_bound_tends_to_launch_radius():
    assert confinement_radius_spherical(1, 2, 1e-9, UNIT).radius_bound == pytest.approx(2.0, rel=1e-15)


def test_general_bound_reduces_to_spherical():
    ball = UniformBall([0, 0, 0], 1.0, 2.0)
    u0, v0 = np.array([3.0, 0, 0]), np.array([0, 0.5, 0.2])
    g = confinement_distance_general(ball, u0, v0, UNIT)
    s = confinement_radius_spherical(2.0, 3.0, float(np.linalg.norm(v0)), UNIT)
    assert g.eta == pytest.approx(s.eta, rel=1e-14)
    assert g.radius_bound == pytest.approx(s.radius_bound, rel=1e-14)
    assert g.frame is BoundFrame.GENERAL_FROM_CLOSURE


def test_general_bound_near_escape_is_large(two_balls):
    u0 = np.array([2.0, 0, 3.0])
    U0 = potential(two_balls, u0, UNIT)
    v0 = np.array([0, math.sqrt(1.9 * U0), 0])
    b = confinement_distance_general(two_balls, u0, v0, UNIT)
    assert b.eta == pytest.approx(0.05 * U0, rel=1e-12)
    assert b.radius_bound == pytest.approx(two_balls.total_mass() / (0.05 * U0), rel=1e-12)
    with pytest.raises(AtOrAboveEscape):
        confinement_distance_general(two_balls, u0, np.array([0, math.sqrt(2 * U0), 0]), UNIT)


def test_bound_dominance(two_balls, voxel4):
    rng = np.random.default_rng(0)
    for dist in (two_balls, voxel4, UniformBall([0, 0, 0], 1, 1)):
        c, r = dist.bounding_ball()
        for _ in range(20):
            d = rng.normal(size=3)
            u0 = c + rng.uniform(1.2, 4) * r * d / np.linalg.norm(d)
            far = dist.max_distance(u0)
            v0 = rng.uniform(0, 0.99) * math.sqrt(2 * dist.total_mass() / far) * np.array([0, 0, 1.0])
            exact = confinement_distance_general(dist, u0, v0, UNIT).radius_bound
            loose = confinement_distance_from_extent(dist, u0, v0, UNIT).radius_bound
            assert loose >= exact * (1 - 1e-12)


def test_escape_speed_lower_bound(two_balls):
    ball = UniformBall([0, 0, 0], 1.0, 1.0)
    u0 = np.array([0, 0, 3.0])
    lb = escape_speed_lower_bound(ball, u0, UNIT)
    assert lb == pytest.approx(math.sqrt(2 / 4))
    assert lb <= escape_speed_spherical(1.0, 3.0, UNIT)
    assert escape_speed_lower_bound(PointMass([0, 0, 0], 1.0), u0, UNIT) == pytest.approx(
        escape_speed_spherical(1.0, 3.0, UNIT), rel=1e-15)
    for dist in (ball, two_balls):
        assert escape_speed_lower_bound(dist, u0, UNIT, via_density=True) == pytest.approx(
            escape_speed_lower_bound(dist, u0, UNIT), rel=1e-12)
    with pytest.raises(DegenerateSupport):
        escape_speed_lower_bound(PointMass([0, 0, 0], 1.0), u0, UNIT, via_density=True)


# -- classifier ---------------------------------------------------------------

def body_with_mass(m):
    return UniformBall([0, 0, 0], 1.0, m)


def test_diameter_criterion_examples():
    # c = G = 1, diam(B) = 2: 2GM = 1.1 * 2 -> M = 1.1
    v = classify_black_hole(body_with_mass(1.1), ([0, 0, 0], 1.0), Criterion.DIAMETER, UNIT)
    assert v.is_black_hole
    assert v.margin == pytest.approx(1.1)
    assert v.photon_confinement_radius == pytest.approx(11 * 2.0)
    v = classify_black_hole(body_with_mass(0.9), ([0, 0, 0], 1.0), Criterion.DIAMETER, UNIT)
    assert not v.is_black_hole
    assert v.margin == pytest.approx(0.9)
    assert v.photon_confinement_radius is None


def test_symmetric_density_at_threshold_is_not_a_black_hole():
    r = 2.0
    d = 3 / (8 * math.pi) / r**2
    v = classify_black_hole(UniformBall.from_density([0, 0, 0], r, d), ([0, 0, 0], r),
                            Criterion.DENSITY_SYMMETRIC, UNIT)
    assert not v.is_black_hole and v.margin == 1.0


def test_max_pair_distance_criterion():
    body = BallUnion([UniformBall([-1, 0, 0], 0.5, 2.0), UniformBall([1, 0, 0], 0.5, 2.0)])
    # B centered at 0 with radius 2: farthest body point 1.5 away -> max pair 3.5
    v = classify_black_hole(body, ([0, 0, 0], 2.0), Criterion.MAX_PAIR_DISTANCE, UNIT)
    assert v.margin == pytest.approx(8.0 / 3.5)
    assert v.photon_confinement_radius == pytest.approx(3.5 / (1 - 3.5 / 8.0))


def test_criterion_misuse(two_balls):
    with pytest.raises(WrongShape):
        classify_black_hole(two_balls, two_balls.bounding_ball(), Criterion.DENSITY_SYMMETRIC, UNIT)
    ball = body_with_mass(1.0)
    with pytest.raises(WrongShape):
        classify_black_hole(ball, ([0, 0, 0], 2.0), Criterion.DENSITY_SYMMETRIC, UNIT)
    with pytest.raises(NotContaining):
        classify_black_hole(two_balls, ([0, 0, 0], 2.0), Criterion.DIAMETER, UNIT)
    with pytest.raises(DegenerateSupport):
        classify_black_hole(PointMass([0, 0, 0], 1.0), ([0, 0, 0], 1.0), Criterion.DENSITY_BALL, UNIT)


def test_density_criteria_differ_by_two():
    for r in (0.5, 1.0, 7.0):
        body = UniformBall.from_density([1, 2, 3], r, 1.0)
        sym = classify_black_hole(body, ([1, 2, 3], r), Criterion.DENSITY_SYMMETRIC, UNIT)
        asym = classify_black_hole(body, ([1, 2, 3], r), Criterion.DENSITY_ASYMMETRIC, UNIT)
        assert asym.required == pytest.approx(2 * sym.required, rel=1e-15)


def test_density_ball_equals_asymmetric_for_ball_body():
    body = RadialProfile([0, 0, 0], [(0.5, 10.0), (1.0, 0.1)])
    a = classify_black_hole(body, ([0, 0, 0], 1.0), Criterion.DENSITY_BALL, UNIT)
    b = classify_black_hole(body, ([0, 0, 0], 1.0), Criterion.DENSITY_ASYMMETRIC, UNIT)
    assert a.margin == pytest.approx(b.margin, rel=1e-14)
    assert a.is_black_hole == b.is_black_hole


def test_voxel_classification_runs(voxel4):
    v = classify_black_hole(voxel4, voxel4.bounding_ball(), Criterion.MAX_PAIR_DISTANCE, UNIT)
    assert v.margin > 0


# -- cosmology ------------------------------------------------------------------

def test_cosmology_numbers():
    assert cosmology_K() == pytest.approx(3.22e26, rel=1e-2)
    rep = cosmology_report(4e26, 1e-23)
    assert rep.threshold == pytest.approx(2e-27, rel=0.1)
    assert 4000 <= rep.ratio <= 6000
    assert rep.verdict
    assert cosmology_report(4e26, 0.0).ratio == 0.0
    assert not cosmology_report(4e26, 0.0).verdict
    assert cosmology_report(8e26, 1e-23).threshold == pytest.approx(rep.threshold / 4)
    with pytest.raises(BadParameters):
        cosmology_report(-1.0, 1.0)


def test_photon_launches_stay_within_confinement_radius():
    rb = 1.02
    body = UniformBall([0, 0, 0], 1.0, 1.1 * 2 * rb / 2)
    verdict = classify_black_hole(body, ([0, 0, 0], rb), Criterion.DIAMETER, UNIT)
    assert verdict.is_black_hole
    rng = np.random.default_rng(50)
    for _ in range(50):
        p, d = rng.normal(size=3), rng.normal(size=3)
        u0 = rb * p / np.linalg.norm(p)
        tr = integrate(body, State.at(u0, d / np.linalg.norm(d)), IntegrationOptions(t_end=1e3), UNIT)
        assert tr.termination is Termination.COLLAPSED
        assert np.max(body.distance(tr.u)) <= verdict.photon_confinement_radius
