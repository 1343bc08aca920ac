"""Physical constants, guide geometry and the handful of unit conversions the
command line needs. Everything internal is SI."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import constants as _sc

HBAR = _sc.hbar
RB87_MASS = 1.44316e-25  # kg
RB87_D2_WAVELENGTH = 780.24e-9  # m


@dataclass(frozen=True)
class Constants:
    hbar: float = HBAR
    atom_mass: float = RB87_MASS
    wavelength: float = RB87_D2_WAVELENGTH

    def __post_init__(self):
        for name in ("hbar", "atom_mass", "wavelength"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")

    @property
    def k(self) -> float:
        """Optical wavenumber 2*pi/lambda [1/m]."""
        return 2.0 * math.pi / self.wavelength

    @property
    def recoil_velocity(self) -> float:
        """Two-photon (back-scatter) recoil velocity 2*hbar*k/m [m/s]."""
        return 2.0 * self.hbar * self.k / self.atom_mass


@dataclass(frozen=True)
class GuideConfig:
    radius: float
    orbital_freq: float  # rad/s
    transverse_freq: float  # rad/s

    def __post_init__(self):
        for name in ("radius", "orbital_freq", "transverse_freq"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")

    def sigma_t(self, constants: Constants) -> float:
        """Transverse ground-state rms width sqrt(hbar / 2 m omega_T) [m]."""
        return math.sqrt(constants.hbar / (2.0 * constants.atom_mass * self.transverse_freq))


# unit -> (dimension, SI scale); None scale means "multiply by the atom mass"
_UNITS = {
    "m": ("length", 1.0),
    "mm": ("length", 1e-3),
    "um": ("length", 1e-6),
    "µm": ("length", 1e-6),
    "μm": ("length", 1e-6),
    "nm": ("length", 1e-9),
    "s": ("time", 1.0),
    "ms": ("time", 1e-3),
    "us": ("time", 1e-6),
    "µs": ("time", 1e-6),
    "μs": ("time", 1e-6),
    "rad": ("angle", 1.0),
    "deg": ("angle", math.pi / 180.0),
    "m/s": ("velocity", 1.0),
    "mm/s": ("velocity", 1e-3),
    "kg·m/s": ("momentum", 1.0),
    "kg*m/s": ("momentum", 1.0),
    # momentum written as mass times a velocity
    "m/s·m": ("momentum", None, 1.0),
    "m/s*m": ("momentum", None, 1.0),
    "mm/s·m": ("momentum", None, 1e-3),
    "mm/s*m": ("momentum", None, 1e-3),
}


def _scale(unit: str, mass: float | None) -> tuple[str, float]:
    try:
        entry = _UNITS[unit.strip()]
    except KeyError:
        raise ValueError(
            f"unsupported unit {unit!r}; known units: {', '.join(sorted(_UNITS))}"
        ) from None
    if len(entry) == 2:
        return entry
    dim, _, velocity_scale = entry
    if mass is None:
        raise ValueError(f"unit {unit!r} is mass*velocity and needs mass=")
    return dim, velocity_scale * mass


def convert(value, from_unit: str, to_unit: str, mass: float | None = None):
    """Convert ``value`` between two dimensionally compatible units.

    ``mass`` (kg) is required only for the ``mm/s·m`` style momentum units,
    which express a momentum as atom mass times a velocity.

    >>> convert(1.25, "mm", "m")
    0.00125
    """
    dim_from, s_from = _scale(from_unit, mass)
    dim_to, s_to = _scale(to_unit, mass)
    if dim_from != dim_to:
        raise ValueError(
            f"cannot convert {from_unit!r} ({dim_from}) to {to_unit!r} ({dim_to})"
        )
    if s_from == s_to:
        return value
    return value * s_from / s_to
