"""Command line entry point: ``emhd-lab {run,sweep,converge,lp-check,params}``.

Flags mirror the RunConfig fields; ``--config FILE`` supplies any of them as
JSON and explicit flags override it.  Exit codes: 0 completed, 2 blow-up
detected, 3 Gronwall bound violated (theorem mode), 4 configuration error,
1 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .diagnostics import (
    cancellation_check,
    compare_to_frozen,
    empirical_constant_suite,
    load_frozen_constants,
    reference_field,
    select_theorem_params,
)
from .errors import ConfigError, InvalidBand, InvalidGrid, InvalidParameters
from .experiment_runner.config import (
    OUTPUT_ROOT_ENV,
    PRESETS,
    RunConfig,
    config_from_dict,
    default_output_root,
    load_config,
)
from .experiment_runner.runner import EXIT_CODES, convergence_study, run, sweep
from .littlewood_paley import LPParams, bony_split, commutator, phi_symbol
from .spectral_core import GridSpec, SpectralField, dealiased_product, l2_norm

CONFIG_ERRORS = (ConfigError, InvalidParameters, InvalidBand, InvalidGrid)

# flag dest -> (section, field)
FLAG_MAP = {
    "n": ("grid", "n_per_axis"),
    "alpha": ("params", "alpha"),
    "beta": ("params", "beta"),
    "nu_a": ("params", "nu_a"),
    "nu_b": ("params", "nu_b"),
    "exploration": ("params", "exploration"),
    "nonlinear": ("params", "nonlinear"),
    "theta": ("theorem", "theta"),
    "s": ("theorem", "s"),
    "dt": ("integrator", "dt"),
    "t_end": ("integrator", "t_end"),
    "cfl_safety": ("integrator", "cfl_safety"),
    "max_steps": ("integrator", "max_steps"),
    "blowup_threshold": ("integrator", "blowup_threshold"),
    "adaptive": ("integrator", "adaptive"),
    "dt_max": ("integrator", "dt_max"),
    "initial": ("initial_data", "kind"),
    "spectrum_exponent": ("initial_data", "spectrum_exponent"),
    "k_min": ("initial_data", "k_min"),
    "k_max": ("initial_data", "k_max"),
    "amplitude": ("initial_data", "amplitude"),
    "amplitude_b": ("initial_data", "amplitude_b"),
    "stride": (None, "observer_stride"),
    "output_dir": (None, "output_dir"),
    "seed": (None, "seed"),
    "snapshot_times": (None, "snapshot_times"),
    "until_T0": (None, "until_T0"),
    "svg": (None, "svg"),
}


def _add_run_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("run configuration")
    g.add_argument("--config", type=Path, help="JSON config (or a run's metadata.json)")
    g.add_argument("--n", type=int, help="grid points per axis")
    g.add_argument("--alpha", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--nu-a", type=float)
    g.add_argument("--nu-b", type=float)
    g.add_argument("--exploration", action="store_const", const=True, help="allow alpha + beta <= 2")
    g.add_argument("--linear-only", dest="nonlinear", action="store_const", const=False)
    g.add_argument("--theta", type=float)
    g.add_argument("--s", type=float, help="Sobolev index of E_s")
    g.add_argument("--dt", type=float)
    g.add_argument("--t-end", type=float)
    g.add_argument("--cfl-safety", type=float)
    g.add_argument("--max-steps", type=int)
    g.add_argument("--blowup-threshold", type=float)
    g.add_argument("--adaptive", action="store_const", const=True)
    g.add_argument("--dt-max", type=float)
    g.add_argument("--initial", choices=("random_band",) + PRESETS)
    g.add_argument("--spectrum-exponent", type=float)
    g.add_argument("--k-min", type=int)
    g.add_argument("--k-max", type=int)
    g.add_argument("--amplitude", type=float)
    g.add_argument("--amplitude-b", type=float)
    g.add_argument("--stride", type=int, help="observer stride in steps")
    g.add_argument("--output-dir")
    g.add_argument("--seed", type=int)
    g.add_argument("--snapshot-times", type=float, nargs="*")
    g.add_argument("--until-T0", action="store_const", const=True, help="extend the run to the fitted T0")
    g.add_argument("--svg", action="store_const", const=True)


def config_from_args(args: argparse.Namespace, default_name: str) -> RunConfig:
    base = RunConfig(output_dir=str(default_output_root() / default_name))
    if args.config is not None:
        base = load_config(args.config, base)
    nested: dict = {}
    for dest, (section, key) in FLAG_MAP.items():
        val = getattr(args, dest, None)
        if val is None:
            continue
        if section is None:
            nested[key] = val
        else:
            nested.setdefault(section, {})[key] = val
    return config_from_dict(nested, base)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def cmd_run(args) -> int:
    cfg = config_from_args(args, "run")
    res = run(cfg)
    line = f"{res.status}: {res.termination}, t={res.final_state.time:.6g}, dir={res.run_dir}"
    if res.fit is not None:
        line += f", C_hat={res.fit.C_hat:.4g}, T0={res.fit.T0:.4g}, bound_satisfied={res.fit.bound_satisfied}"
    print(line)
    return res.exit_code


def cmd_sweep(args) -> int:
    cfg = config_from_args(args, "sweep")
    t = time.time()
    rows = sweep(cfg, _floats(args.alphas), _floats(args.betas), _ints(args.seeds), cfg.output_dir, args.workers)
    for r in rows:
        flag = " [exploration]" if r["exploration"] else ""
        print(
            f"alpha={r['alpha']:g} beta={r['beta']:g} seed={r['seed']}{flag}: {r['status']} "
            f"growth={r['max_growth']:.4g} T0={r['T0']:.4g} {r['error']}"
        )
    print(f"{len(rows)} rows in {time.time() - t:.1f}s -> {Path(cfg.output_dir) / 'summary.csv'}")
    return 0


def cmd_converge(args) -> int:
    cfg = config_from_args(args, "converge")
    rep = convergence_study(cfg, _ints(args.resolutions), cfg.output_dir)
    for (n1, n2), d in zip(zip(rep["resolutions"], rep["resolutions"][1:]), rep["pair_differences"]):
        print(f"|u_{n1} - u_{n2}| = {d:.6e}")
    print(f"observed rates: {rep['observed_rates']}  monotone: {rep['monotone']}")
    return 0


def lp_check_report(n: int, seeds: int) -> list[tuple[str, bool, str]]:
    """Littlewood-Paley and cancellation checks as (name, passed, detail) rows."""
    grid = GridSpec(n)
    lp = LPParams(grid)
    rows = []
    mask = grid.galerkin_mask()
    total = sum(phi_symbol(grid, q) for q in lp.shells)
    pu = float(np.max(np.abs(total[mask] - 1.0)))
    rows.append(("partition_of_unity", pu <= 1e-14, f"max error {pu:.2e}"))

    worst_bony = worst_cancel = 0.0
    for seed in range(seeds):
        u, v = reference_field(grid, 2 * seed), reference_field(grid, 2 * seed + 1)
        prod = dealiased_product(u, v)
        lh, hl, hh = bony_split(u, v)
        worst_bony = max(worst_bony, l2_norm(lh + hl + hh - prod) / l2_norm(prod))
        worst_cancel = max(worst_cancel, cancellation_check(u, v, 2.0))
    rows.append(("bony_reconstruction", worst_bony <= 1e-11, f"max relative residual {worst_bony:.2e}"))
    rows.append(("low_high_cancellation", worst_cancel <= 1e-11, f"max normalized residual {worst_cancel:.2e}"))

    u = SpectralField.constant(grid, 1.7)
    c = commutator(u, reference_field(grid, 1), 3, 3, 1.0)
    rows.append(("commutator_constant_u", not np.any(c.coeffs), "exact zero"))

    rep = empirical_constant_suite(max(seeds, 10), grid)
    frozen = load_frozen_constants()["bound"]
    for key, ok in compare_to_frozen(rep, frozen).items():
        group, _, case = key.partition("[")
        val = rep[group][case[:-1]] if case else rep[group]
        ref = frozen[group][case[:-1]] if case else frozen[group]
        rows.append((f"constant {key}", ok, f"measured {val:.4f} vs frozen {ref:.4f} (x1.2)"))
    return rows


def cmd_lp_check(args) -> int:
    rows = lp_check_report(args.n or 64, args.seeds)
    for name, ok, detail in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return 0 if all(ok for _, ok, _ in rows) else 1


def cmd_params(args) -> int:
    tp = select_theorem_params(args.alpha, args.beta, args.s, args.theta)
    out = asdict(tp)
    out.update(theta_upper=tp.theta_upper, s_min=tp.s_min, growth_factor=tp.growth_factor)
    print(json.dumps(out, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="emhd-lab", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single simulation")
    _add_run_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="grid of (alpha, beta, seed) runs")
    _add_run_flags(p)
    p.add_argument("--alphas", required=True, help="comma-separated")
    p.add_argument("--betas", required=True, help="comma-separated")
    p.add_argument("--seeds", default="0", help="comma-separated")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("converge", help="Galerkin self-convergence under grid refinement")
    _add_run_flags(p)
    p.add_argument("--resolutions", default="64,96,128", help="comma-separated")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("lp-check", help="Littlewood-Paley property and constant checks")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--seeds", type=int, default=20)
    p.set_defaults(func=cmd_lp_check)

    p = sub.add_parser("params", help="print the theorem parameters for alpha, beta, s")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--s", type=float)
    p.add_argument("--theta", type=float)
    p.set_defaults(func=cmd_params)
    ap.epilog = f"Default output root: ${OUTPUT_ROOT_ENV} or ./runs"
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CODES["config_error"]
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
