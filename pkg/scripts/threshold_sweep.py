"""Sweep (alpha, beta) across the alpha + beta = 2 line and tabulate E_s growth.

Points with alpha + beta <= 2 run in exploration mode and are flagged; the
others run in theorem mode and get a fitted C_hat, T0 and bound check.

    python scripts/threshold_sweep.py --out runs/threshold --workers 4
"""

import argparse
from dataclasses import replace

from emhd_lab.emhd_rhs import EmhdParams
from emhd_lab.experiment_runner import InitialDataSpec, RunConfig, sweep
from emhd_lab.spectral_core import GridSpec
from emhd_lab.time_integrator import IntegratorConfig


def floats(text):
    return [float(x) for x in text.split(",")]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--alphas", type=floats, default=floats("0.8,1.0,1.2,1.5"))
    ap.add_argument("--betas", type=floats, default=floats("0.8,1.0,1.2,1.5"))
    ap.add_argument("--seeds", type=lambda s: [int(x) for x in s.split(",")], default=[0, 1])
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--t-end", type=float, default=0.1)
    ap.add_argument("--dt", type=float, default=2e-4)
    ap.add_argument("--amplitude", type=float, default=0.3)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="runs/threshold_sweep")
    args = ap.parse_args()

    base = RunConfig(
        grid=GridSpec(args.n),
        params=EmhdParams(1.5, 1.5),
        integrator=IntegratorConfig(dt=args.dt, t_end=args.t_end, blowup_threshold=1e12),
        initial_data=InitialDataSpec(amplitude=args.amplitude),
        observer_stride=10,
    )
    base = replace(base, output_dir=args.out)
    rows = sweep(base, args.alphas, args.betas, args.seeds, args.out, workers=args.workers)

    print(f"{'alpha':>6} {'beta':>6} {'seed':>4} {'mode':>11} {'status':>8} {'growth':>10} {'C_hat':>10} {'T0':>10} bound")
    for r in rows:
        mode = "exploration" if r["exploration"] else "theorem"
        print(f"{r['alpha']:6.2f} {r['beta']:6.2f} {r['seed']:4d} {mode:>11} {r['status']:>8} "
              f"{r['max_growth']:10.4g} {r['C_hat']:10.3g} {r['T0']:10.3g} {r['bound_satisfied']}")
    print(f"summary written to {args.out}/summary.csv")


if __name__ == "__main__":
    main()
