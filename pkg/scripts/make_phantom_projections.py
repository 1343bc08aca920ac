"""Write proj.csv for a Gaussian phantom, for use with ``spps reconstruct``.

    python scripts/make_phantom_projections.py --eta 0.9 --angles 180 --out proj.csv
"""

import argparse
import math

import numpy as np

from spps import CorrelatedGaussianState, project
from spps.io import write_projections_csv


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--eta", type=float, default=0.9)
    parser.add_argument("--angles", type=int, default=180)
    parser.add_argument("--samples", type=int, default=256)
    parser.add_argument("--s-max", type=float, default=6.0)
    parser.add_argument("--noise", type=float, default=0.0, help="gaussian noise relative to peak density")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="proj.csv")
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    state = CorrelatedGaussianState(1.0, 1.0, args.eta)
    s = np.linspace(-args.s_max, args.s_max, args.samples)
    profiles = []
    for theta in np.arange(args.angles) * math.pi / args.angles:
        prof = project(state, theta, s)
        if args.noise > 0:
            noisy = prof.density + rng.normal(0.0, args.noise * prof.density.max(), s.size)
            prof = type(prof)(prof.theta, s, np.clip(noisy, 0.0, None), prof.rms_width)
        profiles.append(prof)
    write_projections_csv(args.out, profiles)
    print(f"wrote {args.angles} projections of an eta={args.eta} phantom to {args.out}")


if __name__ == "__main__":
    main()
