"""Inverse problems: filtered back-projection of phase-space projections and
inference of the beam correlation from measured coherence times."""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .config import ScenarioConfig
from .engine import transverse_bound
from .errors import UnidentifiableError, ValidityError
from .kinematics import check_validity
from .wigner import ETA_CAP, MIN_HALF_WIDTH, ProjectionProfile, WignerGrid, phase_space_area, max_phase_space_area

MIN_QUANTITATIVE_ANGLES = 16


@dataclass(frozen=True, eq=False)
class ProjectionSet:
    """Projection profiles at distinct angles in [0, pi), sharing one s-grid.

    Profiles are renormalized to unit integral on construction.
    """

    profiles: tuple[ProjectionProfile, ...]

    def __post_init__(self):
        profiles = tuple(self.profiles)
        if len(profiles) < 2:
            raise ValueError("need at least 2 projection angles")
        thetas = [p.theta for p in profiles]
        if any(not (0.0 <= t < math.pi) for t in thetas):
            raise ValueError("projection angles must lie in [0, pi)")
        if len(set(thetas)) != len(thetas):
            raise ValueError("projection angles must be distinct")
        s0 = profiles[0].s
        if s0.size < 16:
            raise ValueError("projections need at least 16 s-samples")
        steps = np.diff(s0)
        if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * abs(steps[0]):
            raise ValueError("s-grid must be uniform and increasing")
        normalized = []
        for prof in profiles:
            if prof.s.shape != s0.shape or np.max(np.abs(prof.s - s0)) > 1e-9 * abs(steps[0]):
                raise ValueError(f"profile at theta={prof.theta:.6g} uses a different s-grid")
            total = prof.integral()
            if not total > 0:
                raise ValueError(f"profile at theta={prof.theta:.6g} has non-positive integral")
            normalized.append(ProjectionProfile(prof.theta, s0, prof.density / total, prof.rms_width))
        object.__setattr__(self, "profiles", tuple(sorted(normalized, key=lambda p: p.theta)))

    @property
    def s(self) -> np.ndarray:
        return self.profiles[0].s

    @property
    def thetas(self) -> np.ndarray:
        return np.array([p.theta for p in self.profiles])


def ramp_filter(n_samples: int, ds: float) -> np.ndarray:
    """Frequency response of the band-limited ramp with raised-cosine apodization,
    for zero-padded signals of length ``n_samples``.

    The ramp is built from its spatial (Ram-Lak) kernel so the DC term is exact.
    """
    n = np.fft.fftfreq(n_samples, d=1.0 / n_samples).astype(int)
    kernel = np.zeros(n_samples)
    kernel[0] = 1.0 / (4.0 * ds * ds)
    odd = n % 2 != 0
    kernel[odd] = -1.0 / (np.pi * n[odd] * ds) ** 2
    response = np.real(np.fft.fft(kernel)) * ds
    nu = np.abs(np.fft.fftfreq(n_samples, d=ds))
    window = 0.5 * (1.0 + np.cos(np.pi * nu / nu.max()))
    return response * window


def _angle_weights(thetas):
    # midpoint rule on the circle of period pi; equispaced angles get pi/N each
    n = thetas.size
    prev = np.roll(thetas, 1)
    prev[0] -= math.pi
    nxt = np.roll(thetas, -1)
    nxt[-1] += math.pi
    return (nxt - prev) / 2.0 if n > 1 else np.array([math.pi])


def fbp_reconstruct(projections: ProjectionSet, n_x=256, n_p=256, half_width=None) -> WignerGrid:
    """Filtered back-projection onto an ``n_x`` by ``n_p`` normalized grid.

    ``half_width`` defaults to the largest square inscribed in the disk the
    s-grid covers. The output is renormalized to unit integral; with fewer than
    16 angles it carries an accuracy warning.
    """
    s = projections.s
    ds = float(s[1] - s[0])
    s_reach = min(abs(s[0]), abs(s[-1]))
    if half_width is None:
        half_width = s_reach / math.sqrt(2.0)
    if half_width < MIN_HALF_WIDTH:
        raise ValidityError(
            f"s-grid reaches only +-{s_reach:.3g}; reconstruction half_width must be >= {MIN_HALF_WIDTH}"
        )
    notes = []
    if len(projections.profiles) < MIN_QUANTITATIVE_ANGLES:
        msg = (
            f"only {len(projections.profiles)} projection angles; at least "
            f"{MIN_QUANTITATIVE_ANGLES} are needed for a quantitative reconstruction"
        )
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)

    n_s = s.size
    n_pad = 1 << int(math.ceil(math.log2(2 * n_s)))
    response = ramp_filter(n_pad, ds)
    xt = np.linspace(-half_width, half_width, n_x)[:, None]
    pt = np.linspace(-half_width, half_width, n_p)[None, :]
    weights = _angle_weights(projections.thetas)

    image = np.zeros((n_x, n_p))
    for prof, w in zip(projections.profiles, weights):
        padded = np.zeros(n_pad)
        padded[:n_s] = prof.density
        filtered = np.real(np.fft.ifft(np.fft.fft(padded) * response))[:n_s]
        coord = pt * math.cos(prof.theta) + xt * math.sin(prof.theta)
        image += w * np.interp(coord, s, filtered, left=0.0, right=0.0)

    dx = 2.0 * half_width / (n_x - 1)
    dp = 2.0 * half_width / (n_p - 1)
    total = integrate.trapezoid(integrate.trapezoid(image, dx=dp, axis=1), dx=dx)
    return WignerGrid(image / total, float(half_width), warnings=tuple(notes))


def eta_from_width_samples(samples):
    """Least-squares correlation from projected widths, using
    ``width^2 = 1 + eta sin(2 theta)``. Returns ``(eta, eta_err)``."""
    samples = list(samples)
    if len(samples) < 3:
        raise ValueError(f"need at least 3 (theta, width) samples, got {len(samples)}")
    theta = np.array([t for t, _ in samples], dtype=float)
    width = np.array([w for _, w in samples], dtype=float)
    x = np.sin(2.0 * theta)
    y = width**2 - 1.0
    sxx = float(np.dot(x, x))
    if sxx < 1e-20:
        raise UnidentifiableError(
            "all angles are 0 or pi/2: position and momentum marginals alone "
            "cannot distinguish a homogeneous from a correlated ensemble"
        )
    eta = float(np.dot(x, y) / sxx)
    resid = y - eta * x
    dof = len(samples) - 1
    eta_err = math.sqrt(float(np.dot(resid, resid)) / dof / sxx)
    return eta, eta_err


@dataclass(frozen=True)
class AnalysisReport:
    eta_hat: float
    one_minus_eta: float
    area_hbar: float
    area_max_hbar: float
    coherence_length: float
    transverse_bound: float
    phi: float
    tau_c: float
    feasible: bool = True
    cells: float = float("nan")
    notes: tuple[str, ...] = ()
    inputs_digest: dict = field(default_factory=dict)


def _digest(inputs: dict) -> dict:
    text = json.dumps(inputs, sort_keys=True)
    return dict(inputs, sha256=hashlib.sha256(text.encode()).hexdigest())


def infer_state_from_tau_c(config: ScenarioConfig, phi: float, tau_c: float, beam=None) -> AnalysisReport:
    """Invert a measured coherence time at beam position ``phi`` for eta, the
    occupied phase-space area and the coherence length.

    With per-unit-delay phase rates a (position) and b (momentum), the decay
    rate obeys ``1/tau_c^2 = (a + b)^2 - 2 (1 - eta) a b``, which is linear in
    eta. Outside (-1, 1) the estimate is capped and ``feasible`` is False.
    """
    if not (math.isfinite(tau_c) and tau_c > 0):
        raise ValueError(f"tau_c must be positive, got {tau_c!r}")
    check_validity(config, phi, 0.0)
    beam = config.beam if beam is None else beam
    k, omega, m = config.k, config.omega, config.mass
    a = -k * omega * math.sin(phi) * beam.sigma_x
    q1 = k * (1.0 + math.cos(phi))
    b = q1 * beam.sigma_p / m
    rate_sq = 1.0 / (tau_c * tau_c)

    notes = []
    feasible = True
    if abs(a * b) < 1e-300 or abs(math.sin(phi)) < 1e-12:
        feasible = False
        one_minus = 1.0
        notes.append("unidentifiable: no pump/probe mismatch at this phi; only sigma_p is constrained")
    else:
        one_minus = ((a + b) ** 2 - rate_sq) / (2.0 * a * b)
        if one_minus <= 1.0 - ETA_CAP:
            feasible = False
            notes.append(f"infeasible: tau_c too long for this geometry (1-eta={one_minus:.3g}); eta capped")
            one_minus = 1.0 - ETA_CAP
        elif one_minus >= 1.0 + ETA_CAP:
            feasible = False
            notes.append(f"infeasible: tau_c too short for this geometry (1-eta={one_minus:.3g}); eta capped")
            one_minus = 1.0 + ETA_CAP
    inferred = beam.replace(eta=1.0 - one_minus, one_minus_eta=one_minus)
    hbar = config.constants.hbar
    length = hbar * q1 / m * tau_c
    try:
        t_bound = transverse_bound(config, phi)
    except ValidityError:
        t_bound = math.nan
    inputs = {
        "phi_rad": phi,
        "tau_c_s": tau_c,
        "sigma_x_m": beam.sigma_x,
        "sigma_p_kg_m_s": beam.sigma_p,
        "mass_kg": m,
        "wavelength_m": config.constants.wavelength,
        "omega_orbit_rad_s": omega,
        "omega_transverse_rad_s": config.guide.transverse_freq,
    }
    return AnalysisReport(
        eta_hat=inferred.eta,
        one_minus_eta=inferred.one_minus_eta,
        area_hbar=phase_space_area(inferred, hbar),
        area_max_hbar=max_phase_space_area(inferred, hbar),
        coherence_length=length,
        transverse_bound=t_bound,
        phi=phi,
        tau_c=tau_c,
        feasible=feasible,
        cells=beam.sigma_x / length,
        notes=tuple(notes),
        inputs_digest=_digest(inputs),
    )
