"""Print the headline numbers of the built-in ring-guide scenario."""

import math

from spps import (
    analytic_coherence_time,
    critical_angle,
    default_paper_scenario,
    dephasing_time_estimate,
    infer_state_from_tau_c,
    max_phase_space_area,
    transverse_bound,
)


def main():
    cfg = default_paper_scenario()
    hbar = cfg.constants.hbar
    phi_c = critical_angle(cfg)
    phi38 = math.radians(38)
    q38 = cfg.k * (1 + math.cos(phi38))
    report = infer_state_from_tau_c(cfg, phi_c, 1.1e-3)
    rows = [
        ("critical angle (deg)", math.degrees(phi_c)),
        ("sigma_x sigma_p / hbar", max_phase_space_area(cfg.beam, hbar)),
        ("tau_c at 38 deg (us)", analytic_coherence_time(cfg, phi38) * 1e6),
        ("tau_c at critical angle (ms)", analytic_coherence_time(cfg, phi_c) * 1e3),
        ("dephasing estimate at 38 deg (us)", dephasing_time_estimate(q38, cfg.beam.sigma_p, cfg.constants) * 1e6),
        ("monochromatic 1/e time at 38 deg (us)", cfg.mass / (q38 * cfg.beam.sigma_p) * 1e6),
        ("transverse bound at 4 deg (ms)", transverse_bound(cfg, math.radians(4)) * 1e3),
        ("inferred 1 - eta (tau_c = 1.1 ms)", report.one_minus_eta),
        ("inferred area / hbar", report.area_hbar),
        ("coherence length (um)", report.coherence_length * 1e6),
    ]
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {value:.5g}")


if __name__ == "__main__":
    main()
