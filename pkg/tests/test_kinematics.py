import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spps import (
    CorrelatedGaussianState,
    InfeasibleError,
    ValidityError,
    critical_angle,
    phase_space_area,
    propagate,
    recoil_geometry,
    scattered_fraction,
)
from spps.engine import analytic_coherence_time
from spps.kinematics import generic_tan_theta
from spps.units import RB87_MASS

DEG = math.pi / 180


def test_tangential_incidence(paper):
    kin = recoil_geometry(paper, 0.0, 100e-6)
    assert kin.theta == 0.0
    assert kin.dq_long == 0.0
    assert kin.q1 == pytest.approx(2 * paper.k, rel=1e-15)


def test_recoil_at_38_degrees(paper):
    kin = recoil_geometry(paper, 38 * DEG, 50e-6)
    assert kin.q1 == pytest.approx(1.440e7, rel=1e-3)
    # tan(theta) = 3.519 tan(19 deg)
    ratio = RB87_MASS * paper.omega * 120e-6 / paper.beam.sigma_p
    assert ratio == pytest.approx(3.519, rel=1e-3)
    assert math.degrees(kin.theta) == pytest.approx(math.degrees(math.atan(ratio * math.tan(19 * DEG))), abs=1e-10)
    assert math.degrees(kin.theta) == pytest.approx(50.5, abs=0.05)
    assert kin.dq_long == pytest.approx(-paper.k * paper.omega * 50e-6 * math.sin(38 * DEG), rel=1e-14)
    assert kin.dq_trans == pytest.approx(paper.k * paper.omega * 50e-6 * math.cos(38 * DEG), rel=1e-14)
    assert kin.q2 == kin.q1 + kin.dq_long


def test_theta_at_critical_angle(paper):
    phi_c = critical_angle(paper)
    assert math.degrees(phi_c) == pytest.approx(31.7, abs=0.1)
    assert recoil_geometry(paper, phi_c, 1e-3).theta == pytest.approx(math.pi / 4, abs=1e-12)
    assert math.degrees(recoil_geometry(paper, 31.7 * DEG, 1e-3).theta) == pytest.approx(45.0, abs=0.1)


def test_critical_angle_limits(paper):
    matched = paper.with_beam(sigma_p=RB87_MASS * paper.omega * paper.beam.sigma_x)
    assert math.degrees(critical_angle(matched)) == pytest.approx(90.0, abs=1e-10)
    fast = paper.with_guide(orbital_freq=2 * paper.omega)
    # 2 atan(1 / 7.037)
    assert math.degrees(critical_angle(fast)) == pytest.approx(16.2, abs=0.05)


def test_rotation_guard(paper):
    with pytest.raises(ValidityError):
        recoil_geometry(paper, 0.3, 0.3 / paper.omega)
    recoil_geometry(paper, 0.3, 0.299 / paper.omega)
    with pytest.raises(ValidityError):
        recoil_geometry(paper, math.pi, 1e-5)


@settings(max_examples=200, deadline=None)
@given(st.floats(-3.1, 3.1), st.floats(1e-7, 5.6e-3))
def test_theta_formulas_agree(paper, phi, tau):
    kin = recoil_geometry(paper, phi, tau)
    generic = generic_tan_theta(kin.dq_long, kin.q1, tau, RB87_MASS, paper.beam.sigma_x, paper.beam.sigma_p)
    assert abs(math.tan(kin.theta) - generic) <= 1e-12 * max(1.0, abs(generic))
    # the probed angle does not depend on the delay
    assert recoil_geometry(paper, phi, tau / 2).theta == kin.theta


def test_critical_angle_maximizes_coherence(paper):
    beam = paper.beam.replace(eta=1 - 1e-9, one_minus_eta=1e-9)
    phis = np.arange(0.5, 90.0, 0.5) * DEG
    taus = [analytic_coherence_time(paper, phi, beam) for phi in phis]
    best = phis[int(np.argmax(taus))]
    assert abs(best - critical_angle(paper)) <= 0.5 * DEG


def test_propagate_zero_is_identity():
    state = CorrelatedGaussianState(1e-5, 2.6e-28, 0.3)
    assert propagate(state, 0.0) == state


def test_propagate_half_revolution_width():
    state = CorrelatedGaussianState(10e-6, RB87_MASS * 1.8e-3, 0.0)
    out = propagate(state, 66.5e-3)
    # sqrt(10^2 + 119.7^2) um
    assert out.sigma_x == pytest.approx(120.117e-6, rel=1e-5)
    assert out.sigma_p == state.sigma_p
    assert out.timestamp == pytest.approx(66.5e-3)
    assert phase_space_area(out) == pytest.approx(phase_space_area(state), rel=1e-12)


def test_propagate_moves_mean():
    state = CorrelatedGaussianState(1e-5, 1e-28, 0.0, mean_p=RB87_MASS * 2e-3, mean_x=1e-3)
    assert propagate(state, 0.5).mean_x == pytest.approx(1e-3 + 1e-3, rel=1e-14)


def test_propagate_rejects_negative_time():
    with pytest.raises(ValueError):
        propagate(CorrelatedGaussianState(1.0, 1.0), -1.0)


states = st.builds(
    CorrelatedGaussianState,
    sigma_x=st.floats(1e-6, 1e-3),
    sigma_p=st.floats(0.1, 10.0).map(lambda v: v * RB87_MASS * 1e-3),
    eta=st.floats(-0.99, 0.99),
)


@settings(max_examples=300, deadline=None)
@given(states, st.floats(0.0, 1.0))
def test_area_invariant_under_propagation(state, t):
    assert abs(phase_space_area(propagate(state, t)) / phase_space_area(state) - 1) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(states, st.floats(0.0, 0.5), st.floats(0.0, 0.5))
def test_propagation_semigroup(state, t1, t2):
    a = propagate(propagate(state, t1), t2)
    b = propagate(state, t1 + t2)
    assert a.sigma_x == pytest.approx(b.sigma_x, rel=1e-12)
    assert a.sigma_p == b.sigma_p
    assert abs(a.eta - b.eta) <= 1e-12
    assert a.timestamp == pytest.approx(b.timestamp, rel=1e-12, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(states, st.lists(st.floats(1e-4, 1.0), min_size=2, max_size=6, unique=True))
def test_eta_increases_towards_one(state, times):
    times = sorted(times)
    etas = [propagate(state, t).eta for t in times]
    omes = [propagate(state, t).one_minus_eta for t in times]
    # eta rises once the beam is past any focus
    past_focus = [e for e in etas if e > 0]
    assert all(b >= a - 1e-15 for a, b in zip(past_focus, past_focus[1:]))
    assert all(o > 0 for o in omes)


def test_scattered_fraction(paper):
    c = paper.constants
    q = 2 * c.k
    assert scattered_fraction(0.0, q, 0.16, c) == 0.0
    # hbar 2k / m = 11.77 mm/s; 10 % of it for 160 ms is 188 um
    assert scattered_fraction(188e-6, q, 0.16, c) == pytest.approx(0.10, abs=0.001)
    assert scattered_fraction(1.883e-3, q, 0.16, c) == pytest.approx(1.0, abs=0.001)
    with pytest.raises(InfeasibleError):
        scattered_fraction(2.5e-3, q, 0.16, c)
    with pytest.warns(RuntimeWarning):
        assert scattered_fraction(1.9e-3, q, 0.16, c) == 1.0
