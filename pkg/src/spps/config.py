"""Scenario bundle: constants, guide, initial beam and the pump-probe schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .units import RB87_D2_WAVELENGTH, RB87_MASS, Constants, GuideConfig
from .wigner import CorrelatedGaussianState


@dataclass(frozen=True)
class ScenarioConfig:
    constants: Constants
    guide: GuideConfig
    beam: CorrelatedGaussianState
    phi: float = 0.0
    tau_grid: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        taus = tuple(float(t) for t in self.tau_grid)
        if any(not math.isfinite(t) or t < 0 for t in taus):
            raise ValueError("tau_grid must be finite and non-negative")
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise ValueError("tau_grid must be strictly increasing")
        if not (math.isfinite(self.phi) and abs(self.phi) < math.pi):
            raise ValueError(f"|phi| must be < pi, got {self.phi!r}")
        object.__setattr__(self, "tau_grid", taus)

    @property
    def mass(self) -> float:
        return self.constants.atom_mass

    @property
    def k(self) -> float:
        return self.constants.k

    @property
    def omega(self) -> float:
        return self.guide.orbital_freq

    def with_beam(self, **changes) -> "ScenarioConfig":
        return replace(self, beam=self.beam.replace(**changes))

    def with_guide(self, **changes) -> "ScenarioConfig":
        return replace(self, guide=replace(self.guide, **changes))


def default_paper_scenario() -> ScenarioConfig:
    """The beam after a half revolution in the 1.25 mm radius ring.

    sigma_x = 120 um, sigma_p/m = 1.8 mm/s, eta = 1 - 4.9e-4, 3e5 atoms,
    Omega = 2 pi x 8.4 /s and omega_T = 2 pi x 85 /s. The pump-probe schedule
    is the phi = 38 deg configuration over 0..200 us.
    """
    constants = Constants(atom_mass=RB87_MASS, wavelength=RB87_D2_WAVELENGTH)
    guide = GuideConfig(
        radius=1.25e-3,
        orbital_freq=2.0 * math.pi * 8.4,
        transverse_freq=2.0 * math.pi * 85.0,
    )
    beam = CorrelatedGaussianState.near_unity(
        sigma_x=120e-6,
        sigma_p=RB87_MASS * 1.8e-3,
        one_minus_eta=4.9e-4,
        atom_number=3e5,
    )
    return ScenarioConfig(
        constants=constants,
        guide=guide,
        beam=beam,
        phi=math.radians(38.0),
        tau_grid=tuple(np.linspace(0.0, 200e-6, 41).tolist()),
    )
