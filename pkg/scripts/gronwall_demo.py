"""Theorem-mode run out to the fitted T0, with the growth bound drawn on an SVG.

    python scripts/gronwall_demo.py --amplitude 0.3 --out runs/gronwall
"""

import argparse

from emhd_lab.emhd_rhs import EmhdParams
from emhd_lab.experiment_runner import InitialDataSpec, RunConfig, TheoremOverrides, run
from emhd_lab.spectral_core import GridSpec
from emhd_lab.time_integrator import IntegratorConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--alpha", type=float, default=1.5)
    ap.add_argument("--beta", type=float, default=1.5)
    ap.add_argument("--s", type=float, default=2.0)
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--amplitude", type=float, default=0.3)
    ap.add_argument("--dt", type=float, default=2e-4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="runs/gronwall")
    args = ap.parse_args()

    cfg = RunConfig(
        grid=GridSpec(args.n),
        params=EmhdParams(args.alpha, args.beta),
        theorem=TheoremOverrides(s=args.s),
        integrator=IntegratorConfig(dt=args.dt, t_end=0.05),
        initial_data=InitialDataSpec(amplitude=args.amplitude),
        output_dir=args.out,
        seed=args.seed,
        until_T0=True,
        svg=True,
    )
    res = run(cfg)
    f = res.fit
    E = res.series.column("E_s")
    print(f"status {res.status}, ran to t={res.series.records[-1].time:.4g}")
    print(f"E_s(0) = {E[0]:.4e}, C_hat = {f.C_hat:.4e}, T0 = {f.T0:.4e}")
    print(f"max E_s/E_s(0) = {f.max_growth:.4f}, bound satisfied: {f.bound_satisfied}, covers T0: {f.covers_T0}")
    print(f"outputs in {args.out}")


if __name__ == "__main__":
    main()
