"""Superradiant pump-probe signal: the phase-matching functional Gamma(tau),
decay-curve simulation and Gaussian fits of the coherence time."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .config import ScenarioConfig
from .errors import FitError, ResolutionError, ValidityError
from .kinematics import RecoilKinematics, check_validity, recoil_geometry
from .units import Constants
from .wigner import CorrelatedGaussianState, WignerGrid, to_grid

CLOSED_FORM = "closed-form"
QUADRATURE = "quadrature"
INGESTED = "ingested"
_ENGINE_ALIASES = {"closed": CLOSED_FORM, CLOSED_FORM: CLOSED_FORM, "quad": QUADRATURE, QUADRATURE: QUADRATURE}

# quadrature grids are sized automatically up to this many points per axis
MAX_AUTO_GRID = 2049


@dataclass(frozen=True, eq=False)
class DecayCurve:
    tau: np.ndarray
    gamma: np.ndarray
    phi: float = float("nan")
    source: str = INGESTED
    sigma_gamma: np.ndarray | None = None

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        gamma = np.asarray(self.gamma, dtype=float)
        if tau.ndim != 1 or tau.shape != gamma.shape:
            raise ValueError("tau and gamma must be 1D arrays of equal length")
        if np.any(np.diff(tau) <= 0):
            raise ValueError("tau must be strictly increasing")
        if self.source != INGESTED and np.any((gamma < 0) | (gamma > 1)):
            raise ValueError("simulated gamma must lie in [0, 1]")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "gamma", gamma)
        if self.sigma_gamma is not None:
            sg = np.asarray(self.sigma_gamma, dtype=float)
            if sg.shape != tau.shape or np.any(sg <= 0):
                raise ValueError("sigma_gamma must be positive and match tau")
            object.__setattr__(self, "sigma_gamma", sg)

    @property
    def samples(self):
        sg = self.sigma_gamma if self.sigma_gamma is not None else [None] * len(self.tau)
        return list(zip(self.tau.tolist(), self.gamma.tolist(), list(sg)))

    def scaled(self, factor: float) -> "DecayCurve":
        sg = None if self.sigma_gamma is None else self.sigma_gamma * factor
        return DecayCurve(self.tau, self.gamma * factor, self.phi, INGESTED, sg)


@dataclass(frozen=True)
class CoherenceFit:
    tau_c: float
    tau_c_err: float
    amplitude: float
    residual_rms: float


def _exponent(a, b, eta, one_minus_eta):
    # a^2 + 2 eta a b + b^2, written so that eta -> 1 keeps its digits
    return (a + b) ** 2 - 2.0 * one_minus_eta * a * b


def gamma_closed_form(state: CorrelatedGaussianState, kin: RecoilKinematics) -> float:
    """Gamma(tau)/Gamma(0) for the correlated Gaussian: the squared modulus of its
    characteristic function at wavevector (dq, q1 tau / m)."""
    a, b = kin.phase_rates(state.sigma_x, state.sigma_p)
    return math.exp(-_exponent(a, b, state.eta, state.one_minus_eta))


def required_grid_points(grid_half_width: float, max_phase: float) -> int:
    """Smallest grid size whose step keeps max_phase * step below pi/4."""
    return int(math.floor(2.0 * grid_half_width * max_phase / (math.pi / 4.0))) + 2


def gamma_quadrature(grid: WignerGrid, kin: RecoilKinematics) -> float:
    """Gamma(tau)/Gamma(0) by trapezoidal quadrature of the phase-matching
    integral over a sampled Wigner function."""
    a, b = kin.phase_rates(*grid.scale)
    if abs(a) * grid.dx >= math.pi / 4 or abs(b) * grid.dp >= math.pi / 4:
        need = required_grid_points(grid.half_width, max(abs(a), abs(b)))
        raise ResolutionError(
            f"phase rates ({a:.4g}, {b:.4g}) unresolved on a {grid.n_x}x{grid.n_p} grid "
            f"with half_width {grid.half_width}; need at least {need} points per axis"
        )
    xt, pt = grid.x_axis, grid.p_axis
    inner = integrate.trapezoid(grid.values * np.exp(1j * b * pt)[None, :], dx=grid.dp, axis=1)
    amp = integrate.trapezoid(inner * np.exp(1j * a * xt), dx=grid.dx)
    return float(abs(amp / grid.integral()) ** 2)


def analytic_coherence_time(config: ScenarioConfig, phi: float, beam=None) -> float:
    """1/e time of the closed-form Gamma at beam position ``phi``."""
    beam = config.beam if beam is None else beam
    a1 = -config.k * config.omega * math.sin(phi) * beam.sigma_x
    b1 = config.k * (1.0 + math.cos(phi)) * beam.sigma_p / config.mass
    rate_sq = _exponent(a1, b1, beam.eta, beam.one_minus_eta)
    return math.inf if rate_sq <= 0 else 1.0 / math.sqrt(rate_sq)


def _auto_grid(config: ScenarioConfig, phi: float, taus) -> WignerGrid:
    beam = config.beam
    half_width = 6.0
    kin = recoil_geometry(config, phi, float(max(taus)))
    a, b = kin.phase_rates(beam.sigma_x, beam.sigma_p)
    n = max(256, required_grid_points(half_width, max(abs(a), abs(b))))
    # aliasing from the lattice harmonic along the ellipse's narrow axis is
    # exp(-lam_min (2 pi / h)^2 / 2); hold it near exp(-40)
    lam_min = beam.one_minus_eta if beam.eta >= 0 else 1.0 + beam.eta
    h_max = 2.0 * math.pi * math.sqrt(lam_min / 80.0)
    n = max(n, int(math.ceil(2.0 * half_width / h_max)) + 1)
    if n > MAX_AUTO_GRID:
        raise ResolutionError(
            f"quadrature needs a {n}x{n} grid (limit {MAX_AUTO_GRID}); "
            "use the closed-form engine or a shorter delay range"
        )
    return to_grid(beam, n, n, half_width)


def simulate_decay(config: ScenarioConfig, phi=None, tau_grid=None, engine=CLOSED_FORM, grid=None) -> DecayCurve:
    """Gamma(tau_i)/Gamma(0) for the scenario's beam at position ``phi``.

    ``engine`` is ``"closed-form"`` or ``"quadrature"`` (``"closed"``/``"quad"``
    accepted). A quadrature grid is built from the beam unless ``grid`` is given.
    """
    phi = config.phi if phi is None else phi
    taus = np.asarray(config.tau_grid if tau_grid is None else tau_grid, dtype=float)
    if taus.size == 0:
        raise ValueError("empty tau grid")
    try:
        engine = _ENGINE_ALIASES[engine]
    except KeyError:
        raise ValueError(f"unknown engine {engine!r}") from None
    for tau in (taus[0], taus[-1]):
        check_validity(config, phi, float(tau))
    kins = [recoil_geometry(config, phi, float(t)) for t in taus]
    if engine == CLOSED_FORM:
        gamma = [gamma_closed_form(config.beam, kin) for kin in kins]
    else:
        grid = _auto_grid(config, phi, taus) if grid is None else grid
        gamma = [gamma_quadrature(grid, kin) for kin in kins]
    return DecayCurve(taus, np.clip(gamma, 0.0, 1.0), float(phi), engine)


def _initial_guess(tau, gamma):
    g0 = gamma[0]
    target = g0 / math.e
    below = np.nonzero(gamma < target)[0]
    if below.size:
        i = below[0]
        t0, t1, y0, y1 = tau[i - 1], tau[i], gamma[i - 1], gamma[i]
        tau_c = t0 + (target - y0) * (t1 - t0) / (y1 - y0)
    else:
        tau_c = tau[-1] / math.sqrt(math.log(g0 / gamma[-1]))
    return g0, tau_c


def fit_coherence_time(curve: DecayCurve, max_nfev: int = 2000) -> CoherenceFit:
    """Least-squares fit of ``Gamma0 exp(-tau^2 / tau_c^2)``.

    ``tau_c`` is the 1/e time of the fitted curve. Uncertainties come from the
    fit covariance, scaled by the residual variance unless the curve carries
    per-point ``sigma_gamma``.
    """
    tau, gamma = curve.tau, curve.gamma
    if tau.size < 4:
        raise ValueError(f"need at least 4 samples to fit, got {tau.size}")
    if not np.all(np.isfinite(gamma)) or gamma[0] <= 0:
        raise ValueError("gamma must be finite with a positive first sample")
    if np.min(gamma[1:]) >= 0.9 * gamma[0]:
        raise FitError("insufficient decay: Gamma never drops below 0.9 of its initial value")

    g0, tc0 = _initial_guess(tau, gamma)
    # work in units of the initial guess so both parameters are O(1)
    x = tau / tc0
    weights = 1.0 if curve.sigma_gamma is None else 1.0 / curve.sigma_gamma

    def residuals(params):
        amp, tc = params
        return (amp * np.exp(-(x / tc) ** 2) - gamma) * weights

    result = optimize.least_squares(
        residuals, [g0, 1.0], method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev
    )
    if not result.success or result.status <= 0:
        rms = float(np.sqrt(np.mean(result.fun**2))) if result.fun.size else math.nan
        raise FitError(f"fit did not converge ({result.message}); residual rms {rms:.3g}")
    amp, tc = (float(v) for v in result.x)
    tau_c = float(abs(tc) * tc0)
    plain = amp * np.exp(-(x / tc) ** 2) - gamma
    residual_rms = float(np.sqrt(np.mean(plain**2)))

    dof = max(tau.size - 2, 1)
    jac = result.jac
    try:
        cov = np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        cov = np.full((2, 2), np.inf)
    if curve.sigma_gamma is None:
        cov = cov * float(np.sum(result.fun**2)) / dof
    tau_c_err = math.sqrt(abs(cov[1, 1])) * tc0
    return CoherenceFit(tau_c=tau_c, tau_c_err=float(tau_c_err), amplitude=amp, residual_rms=residual_rms)


def dephasing_time_estimate(q_long: float, sigma_p: float, constants: Constants) -> float:
    """Grating dephasing time m / (2 |q| sigma_p)."""
    if q_long <= 0 or sigma_p <= 0:
        raise ValueError("q_long and sigma_p must be positive")
    return constants.atom_mass / (2.0 * q_long * sigma_p)


def transverse_bound(config: ScenarioConfig, phi: float) -> float:
    """Upper bound (2 Omega k sigma_T cos phi)^-1 on the coherence time set by
    transverse phase matching in the guide's ground state."""
    if not math.isfinite(phi) or abs(phi) >= math.pi / 2:
        raise ValidityError(f"transverse bound needs |phi| < 90 deg, got {math.degrees(phi):.4g} deg")
    sigma_t = config.guide.sigma_t(config.constants)
    return 1.0 / (2.0 * config.omega * config.k * sigma_t * math.cos(phi))
