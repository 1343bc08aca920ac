"""File formats: scenario configs, run manifests, CSV tables and reports.

Every CSV and report written here starts with one ``#`` header line naming the
tool version and the run-manifest digest. Readers skip ``#`` lines.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import ScenarioConfig
from .engine import DecayCurve
from .errors import ParseError
from .tomography import AnalysisReport, ProjectionSet
from .units import Constants, GuideConfig, convert
from .wigner import CorrelatedGaussianState, ProjectionProfile

REQUIRED_KEYS = (
    "mass_kg",
    "wavelength_nm",
    "radius_mm",
    "omega_orbit_hz",
    "omega_transverse_hz",
    "sigma_x_um",
    "sigma_p_mm_per_s",
    "eta",
    "atom_number",
)
OPTIONAL_KEYS = ("one_minus_eta", "phi_deg", "tau_max_us", "tau_points")


def _parse_key_values(text: str, path=None) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno, path)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in REQUIRED_KEYS and key not in OPTIONAL_KEYS:
            raise ParseError(f"unknown key {key!r}", lineno, path)
        if key in values:
            raise ParseError(f"duplicate key {key!r}", lineno, path)
        try:
            number = float(value)
        except ValueError:
            raise ParseError(f"value of {key!r} is not a number: {value!r}", lineno, path) from None
        if not math.isfinite(number):
            raise ParseError(f"value of {key!r} must be finite", lineno, path)
        values[key] = number
    return values


def parse_config(text: str, path=None) -> ScenarioConfig:
    """Build a :class:`ScenarioConfig` from ``key = value`` text with unit-suffixed
    keys (``omega_*_hz`` are cyclic frequencies, i.e. Omega / 2 pi)."""
    values = _parse_key_values(text, path)
    missing = [key for key in REQUIRED_KEYS if key not in values]
    if missing:
        raise ParseError(f"missing required keys: {', '.join(missing)}", path=path)
    mass = values["mass_kg"]
    try:
        constants = Constants(atom_mass=mass, wavelength=convert(values["wavelength_nm"], "nm", "m"))
        guide = GuideConfig(
            radius=convert(values["radius_mm"], "mm", "m"),
            orbital_freq=2.0 * math.pi * values["omega_orbit_hz"],
            transverse_freq=2.0 * math.pi * values["omega_transverse_hz"],
        )
        beam = CorrelatedGaussianState(
            sigma_x=convert(values["sigma_x_um"], "um", "m"),
            sigma_p=convert(values["sigma_p_mm_per_s"], "mm/s·m", "kg·m/s", mass=mass),
            eta=values["eta"],
            atom_number=values["atom_number"],
            one_minus_eta=values.get("one_minus_eta"),
        )
        phi = math.radians(values.get("phi_deg", 0.0))
        taus = ()
        if "tau_max_us" in values:
            points = int(values.get("tau_points", 41))
            taus = tuple(np.linspace(0.0, values["tau_max_us"] * 1e-6, points).tolist())
        return ScenarioConfig(constants, guide, beam, phi, taus)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), path=path) from exc


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read config: {exc.strerror}", path=path) from exc
    return parse_config(text, path)


def format_config(config: ScenarioConfig) -> str:
    beam, guide = config.beam, config.guide
    lines = [
        f"mass_kg = {config.mass!r}",
        f"wavelength_nm = {config.constants.wavelength * 1e9!r}",
        f"radius_mm = {guide.radius * 1e3!r}",
        f"omega_orbit_hz = {guide.orbital_freq / (2 * math.pi)!r}",
        f"omega_transverse_hz = {guide.transverse_freq / (2 * math.pi)!r}",
        f"sigma_x_um = {beam.sigma_x * 1e6!r}",
        f"sigma_p_mm_per_s = {beam.sigma_p / config.mass * 1e3!r}",
        f"eta = {beam.eta!r}",
        f"one_minus_eta = {beam.one_minus_eta!r}",
        f"atom_number = {beam.atom_number!r}",
        f"phi_deg = {math.degrees(config.phi)!r}",
    ]
    if config.tau_grid:
        lines.append(f"tau_max_us = {config.tau_grid[-1] * 1e6!r}")
        lines.append(f"tau_points = {len(config.tau_grid)}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RunManifest:
    command: str
    config_path: str | None
    output_dir: str
    flags: dict = field(default_factory=dict)
    config_text: str = ""
    created: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    version: str = __version__

    @property
    def digest(self) -> str:
        """sha256 over everything except the creation time (first 16 hex digits)."""
        payload = asdict(self)
        payload.pop("created")
        text = json.dumps(payload, sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def header(self) -> str:
        return f"# spps {self.version} command={self.command} manifest={self.digest} created={self.created}"

    def write(self, out_dir) -> Path:
        path = Path(out_dir) / "manifest.json"
        data = asdict(self)
        data["digest"] = self.digest
        path.write_text(json.dumps(data, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
        return path


def fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.15g}"


def write_csv(path, columns, rows, manifest: RunManifest | None = None) -> Path:
    path = Path(path)
    buf = io.StringIO()
    if manifest is not None:
        buf.write(manifest.header() + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def _read_table(path, expected, optional=()):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read: {exc.strerror}", path=path) from exc
    lines = list(_data_lines(text))
    if not lines:
        raise ParseError("file is empty", path=path)
    lineno, header = lines[0]
    columns = [c.strip() for c in header.split(",")]
    allowed = [list(expected), list(expected) + list(optional)]
    if columns not in allowed:
        raise ParseError(f"expected header {','.join(expected)}, got {header!r}", lineno, path)
    rows = []
    for lineno, line in lines[1:]:
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != len(columns):
            raise ParseError(f"expected {len(columns)} fields, got {len(parts)}", lineno, path)
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise ParseError(f"non-numeric field in {line!r}", lineno, path) from None
        if not all(math.isfinite(v) for v in values):
            raise ParseError(f"non-finite field in {line!r}", lineno, path)
        rows.append((lineno, values))
    if not rows:
        raise ParseError("no data rows", path=path)
    return columns, rows


def read_decay_csv(path, phi=float("nan")) -> DecayCurve:
    """Read ``tau_us,gamma[,sigma_gamma]`` into an ingested :class:`DecayCurve`."""
    columns, rows = _read_table(path, ("tau_us", "gamma"), ("sigma_gamma",))
    tau = np.array([r[0] for _, r in rows]) * 1e-6
    gamma = np.array([r[1] for _, r in rows])
    for (lineno, _), step in zip(rows[1:], np.diff(tau)):
        if step <= 0:
            raise ParseError("tau_us must be strictly increasing", lineno, path)
    sigma = None
    if len(columns) == 3:
        sigma = np.array([r[2] for _, r in rows])
        bad = [lineno for lineno, r in rows if r[2] <= 0]
        if bad:
            raise ParseError("sigma_gamma must be positive", bad[0], path)
    return DecayCurve(tau, gamma, phi, "ingested", sigma)


def write_decay_csv(path, curve: DecayCurve, manifest=None) -> Path:
    if curve.sigma_gamma is None:
        rows = zip(curve.tau * 1e6, curve.gamma)
        return write_csv(path, ["tau_us", "gamma"], rows, manifest)
    rows = zip(curve.tau * 1e6, curve.gamma, curve.sigma_gamma)
    return write_csv(path, ["tau_us", "gamma", "sigma_gamma"], rows, manifest)


def read_projections_csv(path) -> ProjectionSet:
    """Read ``theta_deg,s,density`` rows, grouped by angle, into a
    :class:`ProjectionSet`."""
    _, rows = _read_table(path, ("theta_deg", "s", "density"))
    groups: dict[float, list] = {}
    first_line: dict[float, int] = {}
    for lineno, (theta_deg, s, density) in rows:
        if not 0.0 <= theta_deg < 180.0:
            raise ParseError(f"theta_deg {theta_deg} outside [0, 180)", lineno, path)
        groups.setdefault(theta_deg, []).append((s, density))
        first_line.setdefault(theta_deg, lineno)
    profiles = []
    for theta_deg, samples in groups.items():
        s = np.array([v[0] for v in samples])
        density = np.array([v[1] for v in samples])
        if np.any(np.diff(s) <= 0):
            raise ParseError(f"s not increasing for theta_deg={theta_deg}", first_line[theta_deg], path)
        profiles.append(ProjectionProfile(math.radians(theta_deg), s, density, float("nan")))
    try:
        return ProjectionSet(tuple(profiles))
    except ValueError as exc:
        raise ParseError(str(exc), path=path) from exc


def write_projections_csv(path, profiles, manifest=None) -> Path:
    rows = []
    for prof in profiles:
        theta_deg = math.degrees(prof.theta)
        rows.extend((theta_deg, s, d) for s, d in zip(prof.s, prof.density))
    return write_csv(path, ["theta_deg", "s", "density"], rows, manifest)


def format_report(report: AnalysisReport, manifest: RunManifest | None = None, extra=None) -> str:
    """``key = value`` lines mirroring :class:`AnalysisReport`, in display units."""
    lines = []
    if manifest is not None:
        lines.append(manifest.header())
    items = [
        ("feasible", str(report.feasible).lower()),
        ("phi_deg", fmt(math.degrees(report.phi))),
        ("tau_c_us", fmt(report.tau_c * 1e6)),
        ("eta_hat", repr(report.eta_hat)),
        ("one_minus_eta", fmt(report.one_minus_eta)),
        ("area_hbar", fmt(report.area_hbar)),
        ("area_max_hbar", fmt(report.area_max_hbar)),
        ("coherence_length_um", fmt(report.coherence_length * 1e6)),
        ("transverse_bound_us", fmt(report.transverse_bound * 1e6)),
        ("phase_space_cells", fmt(report.cells)),
        ("inputs_sha256", report.inputs_digest.get("sha256", "")),
    ]
    for key, value in sorted(report.inputs_digest.items()):
        if key != "sha256":
            items.append((f"input.{key}", fmt(value)))
    for key, value in (extra or {}).items():
        items.append((key, value if isinstance(value, str) else fmt(value)))
    for i, note in enumerate(report.notes):
        items.append((f"note.{i}", note))
    lines.extend(f"{key} = {value}" for key, value in items)
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict:
    out = {}
    for _, line in _data_lines(text):
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def ensure_dir(path) -> Path:
    path = Path(path)
    os.makedirs(path, exist_ok=True)
    return path
