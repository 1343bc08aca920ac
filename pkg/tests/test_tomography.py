import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spps import (
    CorrelatedGaussianState,
    ProjectionSet,
    UnidentifiableError,
    critical_angle,
    eta_from_width_samples,
    fbp_reconstruct,
    fit_coherence_time,
    infer_state_from_tau_c,
    moments,
    project,
    simulate_decay,
    to_grid,
)
from spps.engine import analytic_coherence_time

DEG = math.pi / 180
S_GRID = np.linspace(-6, 6, 256)


def phantom(eta, n_angles=180, s=S_GRID):
    state = CorrelatedGaussianState(1.0, 1.0, eta)
    thetas = np.arange(n_angles) * math.pi / n_angles
    return ProjectionSet(tuple(project(state, t, s) for t in thetas))


@pytest.mark.parametrize("eta", [0.0, 0.5, -0.5, 0.9, 0.99])
def test_fbp_round_trip(eta):
    mx, mp, vx, vp, corr = moments(fbp_reconstruct(phantom(eta)))
    assert abs(corr - eta) < 0.005
    assert abs(vx - 1) < 0.02 and abs(vp - 1) < 0.02
    assert abs(mx) < 1e-3 and abs(mp) < 1e-3


def test_fbp_from_grid_projections():
    grid = to_grid(CorrelatedGaussianState(1.0, 1.0, 0.7), 256, 256, 6)
    s = np.linspace(-6, 6, 256)
    thetas = np.arange(180) * DEG
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rec = fbp_reconstruct(ProjectionSet(tuple(project(grid, t, s) for t in thetas)))
    assert abs(moments(rec)[4] - 0.7) < 0.005
    assert rec.warnings == ()


def test_fbp_normalized_and_resizable():
    rec = fbp_reconstruct(phantom(0.3), 128, 96)
    assert rec.values.shape == (128, 96)
    assert rec.integral() == pytest.approx(1.0, abs=1e-12)


def test_fbp_few_angles_warns():
    with pytest.warns(RuntimeWarning, match="projection angles"):
        rec = fbp_reconstruct(phantom(0.5, n_angles=2))
    assert rec.warnings


def test_projection_set_validation():
    state = CorrelatedGaussianState(1.0, 1.0, 0.2)
    a = project(state, 0.0, S_GRID)
    b = project(state, 1.0, np.linspace(-5, 5, 256))
    with pytest.raises(ValueError, match="s-grid"):
        ProjectionSet((a, b))
    with pytest.raises(ValueError, match="at least 2"):
        ProjectionSet((a,))
    with pytest.raises(ValueError, match="distinct"):
        ProjectionSet((a, project(state, 0.0, S_GRID)))
    with pytest.raises(ValueError, match=r"\[0, pi\)"):
        ProjectionSet((a, project(state, 4.0, S_GRID)))


def test_eta_from_widths_exact():
    samples = [(0.0, 1.0), (math.pi / 4, math.sqrt(1.8)), (3 * math.pi / 4, math.sqrt(0.2))]
    eta, err = eta_from_width_samples(samples)
    assert eta == pytest.approx(0.8, abs=1e-14)
    assert err < 1e-12


def test_eta_from_widths_unidentifiable():
    with pytest.raises(UnidentifiableError, match="homogeneous"):
        eta_from_width_samples([(0.0, 1.0), (math.pi / 2, 1.0), (0.0, 1.01)])
    with pytest.raises(ValueError):
        eta_from_width_samples([(0.0, 1.0), (math.pi / 2, 1.0)])


def test_eta_from_widths_uncorrelated():
    rng = np.random.default_rng(3)
    thetas = np.linspace(0, math.pi, 12, endpoint=False)
    widths = 1.0 + rng.normal(0, 0.01, thetas.size)
    eta, err = eta_from_width_samples(zip(thetas, widths))
    assert abs(eta) < 3 * err + 1e-12


def test_eta_from_grid_profiles():
    grid = to_grid(CorrelatedGaussianState(1.0, 1.0, -0.4))
    samples = [(t, project(grid, t).rms_width) for t in np.linspace(0, math.pi, 16, endpoint=False)]
    eta, _ = eta_from_width_samples(samples)
    assert eta == pytest.approx(-0.4, abs=1e-3)


def test_infer_paper_numbers(paper):
    phi_c = critical_angle(paper)
    report = infer_state_from_tau_c(paper, phi_c, 1.19e-3)
    assert report.feasible
    assert report.one_minus_eta == pytest.approx(4.9e-4, rel=0.05)
    assert report.area_hbar == pytest.approx(9.3, abs=0.1)
    # hbar q1 / m * tau_c with q1 = k (1 + cos phi_c)
    q1 = paper.k * (1 + math.cos(phi_c))
    assert report.coherence_length == pytest.approx(paper.constants.hbar * q1 / paper.mass * 1.19e-3, rel=1e-14)
    assert report.coherence_length == pytest.approx(12.96e-6, rel=2e-3)
    assert report.area_max_hbar == pytest.approx(295.59, abs=0.01)
    assert report.cells == pytest.approx(paper.beam.sigma_x / report.coherence_length, rel=1e-14)
    assert report.transverse_bound == pytest.approx(1.6723e-3, rel=1e-3)
    assert len(report.inputs_digest["sha256"]) == 64


def test_infer_round_trip_38(paper):
    phi = 38 * DEG
    tau_c = analytic_coherence_time(paper, phi)
    report = infer_state_from_tau_c(paper, phi, tau_c)
    assert report.one_minus_eta == pytest.approx(4.9e-4, rel=1e-6)


def test_infer_tangential_unidentifiable(paper):
    report = infer_state_from_tau_c(paper, 0.0, 1e-3)
    assert not report.feasible
    assert "unidentifiable" in report.notes[0]
    assert report.area_hbar == pytest.approx(report.area_max_hbar)


def test_infer_too_long(paper):
    report = infer_state_from_tau_c(paper, 10 * DEG, 10e-3)
    assert not report.feasible
    assert report.eta_hat < 1
    assert "too long" in report.notes[0]


def test_infer_rejects_nonpositive(paper):
    with pytest.raises(ValueError):
        infer_state_from_tau_c(paper, 0.5, 0.0)


@pytest.mark.parametrize("one_minus", [0.1, 0.01, 1e-3, 1e-4])
@pytest.mark.parametrize("phi_deg", [10.0, 20.0, 31.7, 45.0])
def test_simulate_then_invert(paper, one_minus, phi_deg):
    cfg = paper.with_beam(eta=1 - one_minus, one_minus_eta=one_minus)
    phi = phi_deg * DEG
    tau_a = analytic_coherence_time(cfg, phi)
    taus = np.linspace(0, min(2 * tau_a, 0.29 / cfg.omega), 40)
    tau_c = fit_coherence_time(simulate_decay(cfg, phi, taus)).tau_c
    report = infer_state_from_tau_c(cfg, phi, tau_c)
    assert report.feasible
    assert report.one_minus_eta == pytest.approx(one_minus, rel=0.01)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-5, 1e-2), st.floats(2.0, 80.0))
def test_area_bounded_and_length_linear(paper, tau_c, phi_deg):
    r1 = infer_state_from_tau_c(paper, phi_deg * DEG, tau_c)
    r2 = infer_state_from_tau_c(paper, phi_deg * DEG, 2 * tau_c)
    assert r1.area_hbar <= r1.area_max_hbar * (1 + 1e-15)
    assert r2.coherence_length == pytest.approx(2 * r1.coherence_length, rel=1e-14)
    assert 0 < r1.one_minus_eta <= 2


def test_area_equals_max_only_when_uncorrelated(paper):
    phi = 20 * DEG
    uncorr = paper.beam.replace(eta=0.0)
    report = infer_state_from_tau_c(paper, phi, analytic_coherence_time(paper, phi, uncorr))
    assert report.eta_hat == pytest.approx(0.0, abs=1e-12)
    assert report.area_hbar == pytest.approx(report.area_max_hbar, rel=1e-12)
