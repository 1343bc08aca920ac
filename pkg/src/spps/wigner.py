"""Wigner functions of a 1D beam: the correlated Gaussian, sampled grids,
Radon projections and phase-space area.

Tomography works in normalized coordinates ``xt = (x - <x>)/sigma_x`` and
``pt = (p - <p>)/sigma_p``. A projection at angle ``theta`` is the density of
``s = pt*cos(theta) + xt*sin(theta)``, so ``theta = 0`` is the momentum
marginal and ``theta = pi/2`` the spatial one. For the correlated Gaussian the
projected variance is ``1 + eta*sin(2*theta)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, ndimage

from .errors import ResolutionError
from .units import HBAR

ETA_CAP = 1.0 - 1e-9
MIN_GRID_POINTS = 16
MIN_HALF_WIDTH = 4.0


@dataclass(frozen=True)
class CorrelatedGaussianState:
    """Gaussian Wigner function with rms widths ``sigma_x`` [m], ``sigma_p``
    [kg m/s] and position-momentum correlation ``eta = <xp>/(sigma_x sigma_p)``.

    ``one_minus_eta`` is carried alongside ``eta`` because the interesting beams
    sit at ``eta = 1 - O(1e-4)``, where ``1 - eta`` computed from ``eta`` alone
    loses most of its digits. It defaults to ``1 - eta``.
    """

    sigma_x: float
    sigma_p: float
    eta: float = 0.0
    atom_number: float = 1.0
    mean_x: float = 0.0
    mean_p: float = 0.0
    timestamp: float = 0.0
    one_minus_eta: float | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("sigma_x", "sigma_p", "eta", "atom_number", "mean_x", "mean_p", "timestamp"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.sigma_x <= 0 or self.sigma_p <= 0:
            raise ValueError("sigma_x and sigma_p must be positive")
        if self.atom_number <= 0:
            raise ValueError("atom_number must be positive")

        eta = float(self.eta)
        ome = self.one_minus_eta
        if ome is not None:
            ome = float(ome)
            if not (math.isfinite(ome) and 0.0 < ome < 2.0):
                raise ValueError(f"one_minus_eta must lie in (0, 2), got {ome!r}")
            if abs((1.0 - ome) - eta) > 1e-9:
                raise ValueError(f"eta={eta!r} inconsistent with one_minus_eta={ome!r}")
            eta = 1.0 - ome
        if abs(eta) > 1.0:
            raise ValueError(f"|eta| must be < 1, got {eta!r}")
        # a bare eta at (or rounded to) +-1 is capped; an explicit positive
        # one_minus_eta is trusted however small
        if ome is None and abs(eta) > ETA_CAP:
            warnings.warn(f"|eta|={abs(eta)!r} capped at {ETA_CAP!r}", RuntimeWarning, stacklevel=3)
            eta = math.copysign(ETA_CAP, eta)
        if eta < -ETA_CAP:
            warnings.warn(f"eta={eta!r} capped at {-ETA_CAP!r}", RuntimeWarning, stacklevel=3)
            eta, ome = -ETA_CAP, None
        if ome is None:
            ome = 1.0 - eta
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "one_minus_eta", ome)

    @classmethod
    def near_unity(cls, sigma_x, sigma_p, one_minus_eta, **kwargs):
        """Build a state from ``1 - eta`` directly (no cancellation)."""
        return cls(sigma_x, sigma_p, 1.0 - one_minus_eta, one_minus_eta=one_minus_eta, **kwargs)

    @property
    def one_minus_eta_sq(self) -> float:
        """``1 - eta**2`` to full relative precision."""
        return self.one_minus_eta * (1.0 + self.eta)

    def replace(self, **changes) -> "CorrelatedGaussianState":
        values = {
            "sigma_x": self.sigma_x,
            "sigma_p": self.sigma_p,
            "eta": self.eta,
            "atom_number": self.atom_number,
            "mean_x": self.mean_x,
            "mean_p": self.mean_p,
            "timestamp": self.timestamp,
            "one_minus_eta": self.one_minus_eta,
        }
        if "eta" in changes and "one_minus_eta" not in changes:
            values["one_minus_eta"] = None
        values.update(changes)
        return CorrelatedGaussianState(**values)


def _normalized_density(xt, pt, eta, one_minus_eta_sq):
    quad = (xt * xt - 2.0 * eta * xt * pt + pt * pt) / (2.0 * one_minus_eta_sq)
    return np.exp(-quad) / (2.0 * math.pi * math.sqrt(one_minus_eta_sq))


def evaluate_gaussian(state: CorrelatedGaussianState, x, p):
    """Wigner density of ``state`` at physical ``(x, p)``, in 1/(m kg m/s).

    Normalized to unit phase-space integral; scalars or broadcastable arrays.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(p))):
        raise ValueError("x and p must be finite")
    xt = (x - state.mean_x) / state.sigma_x
    pt = (p - state.mean_p) / state.sigma_p
    value = _normalized_density(xt, pt, state.eta, state.one_minus_eta_sq) / (
        state.sigma_x * state.sigma_p
    )
    return value if value.ndim else float(value)


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """Wigner function sampled on a uniform grid in normalized coordinates.

    ``values[i, j]`` is the density at ``(x_axis[i], p_axis[j])`` per unit
    normalized phase-space area. ``scale`` holds the ``(sigma_x, sigma_p)`` used
    for the normalization and ``center`` the physical means subtracted first.
    """

    values: np.ndarray
    half_width: float
    scale: tuple[float, float] = (1.0, 1.0)
    center: tuple[float, float] = (0.0, 0.0)
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError("values must be a 2D array")
        if min(values.shape) < MIN_GRID_POINTS:
            raise ResolutionError(
                f"grid {values.shape} too small; need at least {MIN_GRID_POINTS} points per axis"
            )
        if self.half_width < MIN_HALF_WIDTH:
            raise ResolutionError(f"half_width {self.half_width} < {MIN_HALF_WIDTH}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_x(self) -> int:
        return self.values.shape[0]

    @property
    def n_p(self) -> int:
        return self.values.shape[1]

    @property
    def x_axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n_x)

    @property
    def p_axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n_p)

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / (self.n_x - 1)

    @property
    def dp(self) -> float:
        return 2.0 * self.half_width / (self.n_p - 1)

    def integral(self) -> float:
        return _trapz2(self.values, self.dx, self.dp)


def _trapz2(values, dx, dp):
    return float(integrate.trapezoid(integrate.trapezoid(values, dx=dp, axis=1), dx=dx))


def to_grid(state: CorrelatedGaussianState, n_x=256, n_p=256, half_width=6.0) -> WignerGrid:
    """Sample ``state`` on an ``n_x`` by ``n_p`` grid spanning +-``half_width``
    standard deviations, centered on the state's means."""
    if min(n_x, n_p) < MIN_GRID_POINTS:
        raise ResolutionError(f"need n_x, n_p >= {MIN_GRID_POINTS}, got ({n_x}, {n_p})")
    if half_width < MIN_HALF_WIDTH:
        raise ResolutionError(f"half_width {half_width} < {MIN_HALF_WIDTH}")
    xt = np.linspace(-half_width, half_width, n_x)
    pt = np.linspace(-half_width, half_width, n_p)
    values = _normalized_density(xt[:, None], pt[None, :], state.eta, state.one_minus_eta_sq)
    grid = WignerGrid(
        values,
        float(half_width),
        scale=(state.sigma_x, state.sigma_p),
        center=(state.mean_x, state.mean_p),
    )
    total = grid.integral()
    if abs(total - 1.0) > 1e-3:
        raise ResolutionError(
            f"grid integral {total:.6g} deviates from 1 by more than 1e-3; "
            "increase half_width or the number of points"
        )
    return grid


@dataclass(frozen=True, eq=False)
class ProjectionProfile:
    theta: float
    s: np.ndarray
    density: np.ndarray
    rms_width: float

    @property
    def samples(self):
        return list(zip(self.s.tolist(), self.density.tolist()))

    def integral(self) -> float:
        return float(integrate.trapezoid(self.density, self.s))


def _profile_width(s, density):
    norm = integrate.trapezoid(density, s)
    mean = integrate.trapezoid(s * density, s) / norm
    var = integrate.trapezoid((s - mean) ** 2 * density, s) / norm
    return math.sqrt(var)


def gaussian_projection_variance(eta, theta, one_minus_eta=None):
    """``1 + eta*sin(2 theta)``, evaluated without cancellation near eta = 1."""
    if one_minus_eta is None:
        one_minus_eta = 1.0 - eta
    s2 = math.sin(2.0 * theta)
    return (1.0 + s2) - s2 * one_minus_eta


def project(source, theta: float, s=None) -> ProjectionProfile:
    """Radon projection of a state or grid at phase-space angle ``theta``.

    ``s`` is the sampling of the projection coordinate. For a :class:`WignerGrid`
    it defaults to the grid step over +-half_width*sqrt(2), which covers the
    grid's corners at any angle; for a state, to 513 points on [-8, 8].
    Gaussian states are projected analytically; grids by rotate-then-sum with
    bilinear interpolation.
    """
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    if isinstance(source, CorrelatedGaussianState):
        s = np.linspace(-8.0, 8.0, 513) if s is None else np.asarray(s, dtype=float)
        var = gaussian_projection_variance(source.eta, theta, source.one_minus_eta)
        density = np.exp(-0.5 * s * s / var) / math.sqrt(2.0 * math.pi * var)
        return ProjectionProfile(float(theta), s, density, math.sqrt(var))
    if not isinstance(source, WignerGrid):
        raise TypeError(f"cannot project {type(source).__name__}")
    return _project_grid(source, theta, s)


# a grid projection narrower than this many cells is not trusted
MIN_STEPS_PER_WIDTH = 3


def _project_grid(grid: WignerGrid, theta, s):
    h = min(grid.dx, grid.dp)
    if s is None:
        # the grid's support projects onto |s| <= half_width * sqrt(2)
        n_s = 2 * int(math.ceil(grid.half_width * math.sqrt(2.0) / h)) + 1
        s = np.linspace(-grid.half_width * math.sqrt(2.0), grid.half_width * math.sqrt(2.0), n_s)
    s = np.asarray(s, dtype=float)
    # t runs along the integration line; diagonal reach covers the corners
    t_max = grid.half_width * math.sqrt(2.0)
    n_t = 2 * int(math.ceil(t_max / h)) + 1
    t = np.linspace(-t_max, t_max, n_t)
    c, sn = math.cos(theta), math.sin(theta)
    xt = s[:, None] * sn + t[None, :] * c
    pt = s[:, None] * c - t[None, :] * sn
    ix = (xt + grid.half_width) / grid.dx
    ip = (pt + grid.half_width) / grid.dp
    sampled = ndimage.map_coordinates(grid.values, [ix, ip], order=1, mode="constant", cval=0.0)
    density = integrate.trapezoid(sampled, t, axis=1)
    raw = float(integrate.trapezoid(density, s))
    total = grid.integral()
    if raw <= 0 or abs(raw - total) > 1e-2 * abs(total):
        raise ResolutionError(
            f"projection at theta={theta:.4g} captured {raw:.6g} of grid mass {total:.6g}; "
            "the s-range or grid sampling is too coarse"
        )
    density = density / raw
    width = _profile_width(s, density)
    if width < MIN_STEPS_PER_WIDTH * h:
        raise ResolutionError(
            f"projection at theta={theta:.4g} has rms width {width:.3g}, under {MIN_STEPS_PER_WIDTH} "
            f"grid steps of {h:.3g}; use a finer grid"
        )
    return ProjectionProfile(float(theta), s, density, width)


def phase_space_area(state: CorrelatedGaussianState, hbar: float = HBAR) -> float:
    """Occupied phase-space area sigma_x sigma_p sqrt(1 - eta^2) in units of hbar."""
    return state.sigma_x * state.sigma_p * math.sqrt(state.one_minus_eta_sq) / hbar


def max_phase_space_area(state: CorrelatedGaussianState, hbar: float = HBAR) -> float:
    """Upper bound sigma_x sigma_p / hbar that ignores correlations."""
    return state.sigma_x * state.sigma_p / hbar


def moments(grid: WignerGrid):
    """Return ``(mean_x, mean_p, var_x, var_p, corr)`` of a grid in normalized units."""
    X = grid.x_axis[:, None]
    P = grid.p_axis[None, :]
    w = grid.values
    norm = _trapz2(w, grid.dx, grid.dp)
    mx = _trapz2(w * X, grid.dx, grid.dp) / norm
    mp = _trapz2(w * P, grid.dx, grid.dp) / norm
    vx = _trapz2(w * (X - mx) ** 2, grid.dx, grid.dp) / norm
    vp = _trapz2(w * (P - mp) ** 2, grid.dx, grid.dp) / norm
    cxp = _trapz2(w * (X - mx) * (P - mp), grid.dx, grid.dp) / norm
    return mx, mp, vx, vp, cxp / math.sqrt(vx * vp)
