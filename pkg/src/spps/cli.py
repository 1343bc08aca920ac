"""Command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 model-validity violation,
4 fit or inversion infeasibility.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .config import default_paper_scenario
from .engine import analytic_coherence_time, fit_coherence_time, simulate_decay
from .errors import FitError, SppsError
from .io import (
    RunManifest,
    ensure_dir,
    format_config,
    format_report,
    load_config,
    read_decay_csv,
    read_projections_csv,
    write_csv,
    write_decay_csv,
)
from .kinematics import MAX_ROTATION, critical_angle, propagate
from .svg import Series, line_plot
from .tomography import fbp_reconstruct, infer_state_from_tau_c
from .wigner import moments, phase_space_area

EXIT_OK, EXIT_USAGE, EXIT_VALIDITY, EXIT_INFEASIBLE = 0, 2, 3, 4


def _load(args):
    if args.config is None:
        return default_paper_scenario()
    return load_config(args.config)


def _manifest(args, config):
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config", "out", "parser")}
    return RunManifest(
        command=args.command,
        config_path=None if args.config is None else str(args.config),
        output_dir=str(args.out),
        flags=flags,
        config_text=format_config(config),
    )


def _fmt_time(seconds):
    if seconds >= 1e-3:
        return f"{seconds * 1e3:.4g} ms"
    return f"{seconds * 1e6:.4g} us"


def cmd_simulate_decay(args):
    if args.points < 4:
        args.parser.error("--points must be >= 4")
    config = _load(args)
    phi = config.phi if args.phi is None else math.radians(args.phi)
    tau_max = args.tau_max
    if tau_max is None:
        tau_max = config.tau_grid[-1] if config.tau_grid else 2.5 * analytic_coherence_time(config, phi)
    if not tau_max > 0:
        args.parser.error("--tau-max must be positive")
    taus = np.linspace(0.0, tau_max, args.points)
    curve = simulate_decay(config, phi, taus, engine=args.engine)
    out = ensure_dir(args.out)
    manifest = _manifest(args, config)
    manifest.write(out)
    write_decay_csv(out / "decay.csv", curve, manifest)
    if args.svg:
        plot = line_plot(
            [Series("Gamma", curve.tau * 1e6, curve.gamma, markers=True)],
            title=f"SPPS decay at phi = {math.degrees(phi):.3g} deg ({curve.source})",
            xlabel="pump-probe delay tau (us)",
            ylabel="Gamma / Gamma(0)",
        )
        (out / "decay.svg").write_text(plot, encoding="utf-8")
    fit = fit_coherence_time(curve)
    print(f"phi = {math.degrees(phi):.4g} deg, engine = {curve.source}")
    print(f"tau_c = {_fmt_time(fit.tau_c)} +- {fit.tau_c_err * 1e6:.3g} us (fit); "
          f"analytic {_fmt_time(analytic_coherence_time(config, phi))}")
    return EXIT_OK


def _sweep_taus(config, phi, tau_a, points):
    limit = 0.99 * MAX_ROTATION / config.omega
    return np.linspace(0.0, min(2.5 * tau_a, limit), points)


def cmd_sweep_angle(args):
    if not args.step > 0:
        args.parser.error("--step must be positive")
    if args.phi_max < args.phi_min:
        args.parser.error("--phi-max must be >= --phi-min")
    config = _load(args)
    n_steps = int(math.floor((args.phi_max - args.phi_min) / args.step + 1e-9))
    phis_deg = args.phi_min + args.step * np.arange(n_steps + 1)
    uncorrelated = config.beam.replace(eta=0.0)
    rows = []
    for phi_deg in phis_deg:
        phi = math.radians(float(phi_deg))
        tau_a = analytic_coherence_time(config, phi)
        curve = simulate_decay(config, phi, _sweep_taus(config, phi, tau_a, args.points))
        try:
            tau_fit = fit_coherence_time(curve).tau_c
        except FitError:
            tau_fit = math.nan
        tau_u = analytic_coherence_time(config, phi, uncorrelated)
        rows.append((float(phi_deg), tau_fit * 1e6, tau_a * 1e6, tau_u * 1e6))
    table = np.array(rows)
    out = ensure_dir(args.out)
    manifest = _manifest(args, config)
    manifest.write(out)
    write_csv(out / "sweep.csv", ["phi_deg", "tau_c_us", "tau_c_analytic_us", "tau_c_uncorrelated_us"], rows, manifest)
    if args.svg:
        plot = line_plot(
            [
                Series("correlated beam (fit)", table[:, 0], table[:, 1], markers=True),
                Series("uncorrelated ensemble", table[:, 0], table[:, 3], dashed=True),
            ],
            title="coherence time vs beam position",
            xlabel="phi (deg)",
            ylabel="tau_c (us)",
        )
        (out / "sweep.svg").write_text(plot, encoding="utf-8")
    fitted = table[:, 1]
    best = int(np.nanargmax(fitted)) if np.any(np.isfinite(fitted)) else int(np.argmax(table[:, 2]))
    print(f"argmax phi = {table[best, 0]:.4g} deg (tau_c = {_fmt_time(table[best, 1] * 1e-6)}); "
          f"critical angle {math.degrees(critical_angle(config)):.4g} deg")
    return EXIT_OK


def cmd_analyze(args):
    config = _load(args)
    phi = critical_angle(config) if args.phi is None else math.radians(args.phi)
    extra = {"phi_source": "critical_angle" if args.phi is None else "user"}
    if args.tau_c is not None:
        if not args.tau_c > 0:
            args.parser.error("--tau-c must be positive")
        tau_c = args.tau_c
        extra["tau_c_source"] = "user"
    else:
        curve = read_decay_csv(args.data, phi)
        fit = fit_coherence_time(curve)
        tau_c = fit.tau_c
        extra.update(tau_c_source=str(args.data), tau_c_fit_err_us=fit.tau_c_err * 1e6)
    report = infer_state_from_tau_c(config, phi, tau_c)
    out = ensure_dir(args.out)
    manifest = _manifest(args, config)
    manifest.write(out)
    text = format_report(report, manifest, extra)
    (out / "report.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_reconstruct(args):
    if args.grid < 16:
        args.parser.error("--grid must be >= 16")
    projections = read_projections_csv(args.projections)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        grid = fbp_reconstruct(projections, args.grid, args.grid)
    mx, mp, vx, vp, corr = moments(grid)
    out = ensure_dir(args.out)
    manifest = RunManifest(
        command=args.command,
        config_path=None,
        output_dir=str(args.out),
        flags={"projections": str(args.projections), "grid": args.grid, "svg": args.svg},
        config_text=hashlib.sha256(Path(args.projections).read_bytes()).hexdigest(),
    )
    manifest.write(out)
    xs, ps = grid.x_axis, grid.p_axis
    rows = ((xs[i], ps[j], grid.values[i, j]) for i in range(grid.n_x) for j in range(grid.n_p))
    write_csv(out / "wigner.csv", ["x_tilde", "p_tilde", "value"], rows, manifest)
    summary = [
        manifest.header(),
        f"angles = {len(projections.profiles)}",
        f"mean_x_tilde = {mx:.12g}",
        f"mean_p_tilde = {mp:.12g}",
        f"var_x_tilde = {vx:.12g}",
        f"var_p_tilde = {vp:.12g}",
        f"eta_hat = {corr:.12g}",
    ]
    summary.extend(f"warning = {w}" for w in grid.warnings)
    (out / "moments.txt").write_text("\n".join(summary) + "\n", encoding="utf-8")
    for w in grid.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"eta_hat = {corr:.6f} from {len(projections.profiles)} angles")
    return EXIT_OK


def cmd_propagate(args):
    if not args.t_max >= 0:
        args.parser.error("--t-max must be >= 0")
    if args.points < 1:
        args.parser.error("--points must be >= 1")
    config = _load(args)
    beam = config.beam
    hbar = config.constants.hbar
    times = np.array([0.0]) if args.t_max == 0 else np.linspace(0.0, args.t_max, args.points)
    rows = []
    for t in times:
        state = propagate(beam, float(t), config.mass)
        rows.append((t * 1e3, state.sigma_x * 1e6, state.eta, phase_space_area(state, hbar)))
    out = ensure_dir(args.out)
    manifest = _manifest(args, config)
    manifest.write(out)
    write_csv(out / "propagate.csv", ["t_ms", "sigma_x_um", "eta", "area_hbar"], rows, manifest)
    if args.svg:
        table = np.array(rows)
        plot = line_plot(
            [Series("sigma_x", table[:, 0], table[:, 1])],
            title="ballistic expansion",
            xlabel="t (ms)",
            ylabel="sigma_x (um)",
        )
        (out / "propagate.svg").write_text(plot, encoding="utf-8")
    last = rows[-1]
    print(f"t = {last[0]:.4g} ms: sigma_x = {last[1]:.4g} um, eta = {last[2]:.9f}, area = {last[3]:.4g} hbar")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spps", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"spps {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, config=True):
        p = sub.add_parser(name, help=help_text)
        if config:
            p.add_argument("--config", type=Path, help="scenario config (default: built-in paper scenario)")
        else:
            p.set_defaults(config=None)
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--svg", action="store_true", help="also write an SVG plot")
        p.set_defaults(func=func, parser=p)
        return p

    p = add("simulate-decay", cmd_simulate_decay, "simulate Gamma(tau) and fit tau_c")
    p.add_argument("--phi", type=float, help="beam angle in degrees (default: config)")
    p.add_argument("--tau-max", type=float, help="largest delay in seconds")
    p.add_argument("--points", type=int, default=60)
    p.add_argument("--engine", choices=("closed", "quad"), default="closed")

    p = add("sweep-angle", cmd_sweep_angle, "tau_c versus beam angle")
    p.add_argument("--phi-min", type=float, default=1.0, help="degrees")
    p.add_argument("--phi-max", type=float, default=60.0, help="degrees")
    p.add_argument("--step", type=float, default=0.5, help="degrees")
    p.add_argument("--points", type=int, default=40, help="delays per simulated curve")

    p = add("analyze", cmd_analyze, "infer eta, area and coherence length from tau_c")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--tau-c", type=float, help="coherence time in seconds")
    src.add_argument("--data", type=Path, help="decay.csv to fit")
    p.add_argument("--phi", type=float, help="beam angle in degrees (default: critical angle)")

    p = add("reconstruct", cmd_reconstruct, "filtered back-projection from proj.csv", config=False)
    p.add_argument("--projections", type=Path, required=True)
    p.add_argument("--grid", type=int, default=256)

    p = add("propagate", cmd_propagate, "ballistic evolution of the configured beam")
    p.add_argument("--t-max", type=float, required=True, help="seconds")
    p.add_argument("--points", type=int, default=50)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SppsError as exc:
        print(f"spps {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"spps {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
