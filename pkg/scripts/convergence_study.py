"""Resolution and time-step self-convergence.

Grid study: the same band-limited data integrated at several n with a fixed
step; differences on the common Galerkin modes should shrink with n.
Time study: IFRK4 at n=64 against a reference at 1/16 of the finest step.

    python scripts/convergence_study.py --resolutions 64,96,128 --out runs/convergence
"""

import argparse
import math

import numpy as np

from emhd_lab.emhd_rhs import EmhdParams
from emhd_lab.experiment_runner import InitialDataSpec, RunConfig, convergence_study, make_initial_data
from emhd_lab.spectral_core import GridSpec
from emhd_lab.time_integrator import IntegratorConfig, integrate


def time_order(amplitude, t_end, steps, seed):
    g = GridSpec(64)
    p = EmhdParams(1.5, 1.5)
    st0 = make_initial_data(InitialDataSpec(amplitude=amplitude), g, seed)
    quiet = dict(t_end=t_end, observer_stride=10**9, blowup_threshold=1e300)
    ref, _ = integrate(st0, p, IntegratorConfig(dt=t_end / (16 * steps[-1]), **quiet))
    errs = []
    for n in steps:
        st, _ = integrate(st0, p, IntegratorConfig(dt=t_end / n, **quiet))
        d = np.abs(st.a.coeffs - ref.a.coeffs) ** 2 + np.abs(st.b.coeffs - ref.b.coeffs) ** 2
        errs.append(math.sqrt(float(d.sum())))
    return errs


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--resolutions", default="64,96,128")
    ap.add_argument("--amplitude", type=float, default=1.0)
    ap.add_argument("--dt", type=float, default=2.5e-4)
    ap.add_argument("--t-end", type=float, default=0.1)
    ap.add_argument("--steps", default="16,32,64,128,256", help="step counts for the time study")
    ap.add_argument("--order-amplitude", type=float, default=0.4)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", default="runs/convergence")
    args = ap.parse_args()

    base = RunConfig(
        params=EmhdParams(1.5, 1.5),
        integrator=IntegratorConfig(dt=args.dt, t_end=args.t_end),
        initial_data=InitialDataSpec(amplitude=args.amplitude),
    )
    rep = convergence_study(base, [int(x) for x in args.resolutions.split(",")], args.out)
    print("grid refinement (H^1 x L^2 on common modes)")
    for (n1, n2), d in zip(zip(rep["resolutions"], rep["resolutions"][1:]), rep["pair_differences"]):
        print(f"  |u{n1} - u{n2}| = {d:.3e}")
    print("  observed rates:", ", ".join(f"{r:.2f}" for r in rep["observed_rates"]))
    print("  monotone:", rep["monotone"])

    steps = [int(x) for x in args.steps.split(",")]
    errs = time_order(args.order_amplitude, args.t_end, steps, args.seed)
    print("time refinement at n=64")
    for i, (n, e) in enumerate(zip(steps, errs)):
        order = f"  order {math.log2(errs[i - 1] / e):.3f}" if i else ""
        print(f"  N={n:4d}  error {e:.3e}{order}")


if __name__ == "__main__":
    main()
