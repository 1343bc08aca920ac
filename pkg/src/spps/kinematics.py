"""Recoil geometry of pump-probe scattering in a rotating ring guide, and
ballistic evolution of the beam between measurements."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .config import ScenarioConfig
from .errors import InfeasibleError, ValidityError
from .units import RB87_MASS, Constants
from .wigner import CorrelatedGaussianState

# first-order-in-rotation recoil mismatch; refused beyond this
MAX_ROTATION = 0.3


@dataclass(frozen=True)
class RecoilKinematics:
    """Recoil wavevectors for one pump-probe pair.

    ``theta`` is the phase-space angle probed in the (x/sigma_x, p/sigma_p)
    plane, with ``tan(theta) = -(dq m / q1 tau)(sigma_x / sigma_p)``.
    """

    phi: float
    tau: float
    q1: float
    dq_long: float
    dq_trans: float
    theta: float
    mass: float

    @property
    def q2(self) -> float:
        return self.q1 + self.dq_long

    @property
    def projection_angle(self) -> float:
        """Angle in [0, pi) of the ``project`` frame whose profile Gamma samples.

        The ``project`` coordinate ``pt cos a + xt sin a`` lines up with the
        phase ``dq x + q1 tau p / m`` for ``a = -theta``.
        """
        return (-self.theta) % math.pi

    def phase_rates(self, sigma_x: float, sigma_p: float) -> tuple[float, float]:
        """Dimensionless phase coefficients ``(dq sigma_x, q1 tau sigma_p / m)``."""
        return self.dq_long * sigma_x, self.q1 * self.tau * sigma_p / self.mass


def check_validity(config: ScenarioConfig, phi: float, tau: float) -> None:
    if not (math.isfinite(phi) and abs(phi) < math.pi):
        raise ValidityError(f"|phi| must be < pi, got {phi!r}")
    if not (math.isfinite(tau) and tau >= 0):
        raise ValidityError(f"tau must be non-negative, got {tau!r}")
    rotation = config.omega * tau
    if rotation >= MAX_ROTATION:
        raise ValidityError(
            f"Omega*tau = {rotation:.3g} >= {MAX_ROTATION}: small-rotation recoil "
            f"expressions invalid (tau must be < {MAX_ROTATION / config.omega * 1e3:.4g} ms)"
        )


def guide_tan_theta(config: ScenarioConfig, phi: float, beam=None) -> float:
    beam = config.beam if beam is None else beam
    ratio = config.mass * config.omega * beam.sigma_x / beam.sigma_p
    return ratio * math.sin(phi) / (1.0 + math.cos(phi))


def generic_tan_theta(dq, q1, tau, mass, sigma_x, sigma_p) -> float:
    return -(dq * mass / (q1 * tau)) * (sigma_x / sigma_p)


def recoil_geometry(config: ScenarioConfig, phi: float, tau: float, beam=None) -> RecoilKinematics:
    """Pump recoil ``q1 = k(1 + cos phi)`` and the first-order pump/probe
    mismatch ``k Omega tau (-sin phi, cos phi)`` in the co-rotating frame."""
    check_validity(config, phi, tau)
    beam = config.beam if beam is None else beam
    k = config.k
    rot = config.omega * tau
    q1 = k * (1.0 + math.cos(phi))
    dq_long = -k * rot * math.sin(phi)
    dq_trans = k * rot * math.cos(phi)
    tan_theta = guide_tan_theta(config, phi, beam)
    if tau > 0 and q1 > 0:
        generic = generic_tan_theta(dq_long, q1, tau, config.mass, beam.sigma_x, beam.sigma_p)
        if abs(generic - tan_theta) > 1e-12 * max(1.0, abs(tan_theta)):
            raise RuntimeError(f"projection angle mismatch: {tan_theta!r} vs {generic!r}")
    return RecoilKinematics(
        phi=phi,
        tau=tau,
        q1=q1,
        dq_long=dq_long,
        dq_trans=dq_trans,
        theta=math.atan(tan_theta),
        mass=config.mass,
    )


def critical_angle(config: ScenarioConfig, beam=None) -> float:
    """Beam position phi_c [rad] at which the probe angle is pi/4."""
    beam = config.beam if beam is None else beam
    return 2.0 * math.atan(beam.sigma_p / (config.mass * config.omega * beam.sigma_x))


def propagate(state: CorrelatedGaussianState, dt: float, mass: float = RB87_MASS):
    """Free flight for ``dt`` seconds: a shear x -> x + p dt / m."""
    if not (math.isfinite(dt) and dt >= 0):
        raise ValueError(f"dt must be non-negative, got {dt!r}")
    if dt == 0:
        return state
    sx, sp, eta = state.sigma_x, state.sigma_p, state.eta
    u = sp * dt / mass
    sx_new = math.sqrt(sx * sx + 2.0 * eta * sx * u + u * u)
    eta_new = (eta * sx + u) / sx_new
    if eta_new >= 0:
        # shear preserves sigma_x^2 (1 - eta^2); use it to keep 1 - eta exact
        ome_sq = state.one_minus_eta_sq * (sx / sx_new) ** 2
        one_minus = ome_sq / (1.0 + eta_new)
    else:
        one_minus = 1.0 - eta_new
    return state.replace(
        sigma_x=sx_new,
        eta=1.0 - one_minus,
        one_minus_eta=one_minus,
        mean_x=state.mean_x + state.mean_p * dt / mass,
        timestamp=state.timestamp + dt,
    )


def scattered_fraction(delta_x_cm: float, q_long: float, separation_time: float, constants: Constants) -> float:
    """Fraction of atoms scattered, from the shift of the beam's center of mass
    after the scattered atoms have separated for ``separation_time``."""
    if separation_time <= 0 or q_long <= 0:
        raise ValueError("separation_time and q_long must be positive")
    full_shift = constants.hbar * q_long / constants.atom_mass * separation_time
    f = delta_x_cm / full_shift
    if f > 1.05:
        raise InfeasibleError(
            f"center-of-mass shift {delta_x_cm:.4g} m exceeds full transfer {full_shift:.4g} m"
        )
    if f < 0.0 or f > 1.0:
        warnings.warn(f"scattered fraction {f:.4g} outside [0, 1]; clamped", RuntimeWarning, stacklevel=2)
        f = min(max(f, 0.0), 1.0)
    return f
