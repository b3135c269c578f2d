"""Single runs, parameter sweeps and resolution studies."""

from __future__ import annotations

import csv
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .. import __version__
from ..diagnostics import (
    DiagnosticsSeries,
    GronwallFit,
    TheoremParams,
    gronwall_monitor,
    select_theorem_params,
)
from ..emhd_rhs import EmhdParams, EmhdState
from ..errors import BlowupDetected, InvalidBand
from ..spectral_core import AREA, GridSpec
from ..time_integrator import IntegratorConfig, integrate
from .config import RunConfig
from .initial_data import RNG_NAME, check_band, make_initial_data
from .io import write_energy_svg, write_json, write_series_csv, write_snapshot

EXIT_CODES = {"completed": 0, "blowup": 2, "bound_violated": 3, "config_error": 4}

GRONWALL_CONVENTION = (
    "C_hat = max over interior samples of max(0, dE_s/dt + 2 D_s) / E_s^(1+gamma), "
    "dE_s/dt by three-point differences; T0 = 1/(2 gamma C_hat (1+E_s(0))^gamma); "
    "bound_satisfied iff E_s(t) <= 1.05 * 2^(2 theta) * E_s(0) for t <= min(T0, t_end)"
)


@dataclass
class RunResult:
    run_dir: Path
    status: str
    termination: str
    exit_code: int
    series: DiagnosticsSeries
    final_state: EmhdState
    theorem: TheoremParams | None
    fit: GronwallFit | None


def theorem_params_for(config: RunConfig) -> TheoremParams | None:
    p = config.params
    if not p.theorem_mode:
        return None
    return select_theorem_params(p.alpha, p.beta, config.sobolev_s, config.theorem.theta)


def _merge(head: DiagnosticsSeries, tail: DiagnosticsSeries) -> DiagnosticsSeries:
    for rec in tail.records[1:]:
        head.append(rec)
    head.metadata.update(tail.metadata, steps=head.metadata.get("steps", 0) + tail.metadata.get("steps", 0))
    return head


def integrate_until_T0(
    state0: EmhdState,
    params: EmhdParams,
    icfg: IntegratorConfig,
    tp: TheoremParams,
    observers=(),
    max_extensions: int = 30,
) -> tuple[EmhdState, DiagnosticsSeries, GronwallFit]:
    """Integrate, fit T0, and keep extending the run until it reaches the fitted T0.

    More samples can only raise C_hat (lowering T0), so the loop settles
    quickly.  If C_hat stays 0 (T0 infinite) the horizon doubles up to
    ``max_extensions`` times and the result reports ``covers_T0=False``.
    """
    state, series = integrate(state0, params, icfg, observers)
    fit = gronwall_monitor(series, tp)
    for _ in range(max_extensions):
        if fit.covers_T0:
            break
        t_last = series.records[-1].time
        extra = fit.T0 - t_last if math.isfinite(fit.T0) else max(t_last - state0.time, icfg.dt)
        extra = max(extra * (1 + 1e-9), icfg.dt)
        state, tail = integrate(state, params, replace(icfg, t_end=extra), observers)
        series = _merge(series, tail)
        fit = gronwall_monitor(series, tp)
    return state, series, fit


class _SnapshotWriter:
    def __init__(self, out: Path, times: Sequence[float]):
        self.out = out
        self.pending = sorted(times)
        self.written: list[dict] = []

    def __call__(self, state: EmhdState, rec):
        while self.pending and state.time >= self.pending[0] - 1e-12:
            target = self.pending.pop(0)
            name = f"snapshot_{len(self.written):03d}.emhd"
            write_snapshot(state, self.out / name)
            self.written.append({"file": name, "requested_time": target, "time": state.time})


def run(config: RunConfig) -> RunResult:
    """Execute one configured run and write its directory.

    Files: ``metadata.json`` (config snapshot, versions, timing, status),
    ``series.csv``, ``gronwall.json`` (theorem mode), snapshots, optional SVG.
    """
    out = Path(config.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create run directory {out}: {exc}") from exc

    started = time.time()
    state0 = make_initial_data(config.initial_data, config.grid, config.seed)
    tp = theorem_params_for(config)
    s = tp.s if tp else config.sobolev_s
    icfg = replace(config.integrator, observer_stride=config.observer_stride, sobolev_s=s)
    snaps = _SnapshotWriter(out, config.snapshot_times)
    fit = None
    try:
        if config.until_T0 and tp is not None:
            state, series, fit = integrate_until_T0(state0, config.params, icfg, tp, [snaps])
        else:
            state, series = integrate(state0, config.params, icfg, [snaps])
        termination = series.metadata["termination"]
    except BlowupDetected as exc:
        state = exc.state
        series = exc.series
        termination = f"blowup_{exc.reason}"
        series.metadata.update(termination=termination, blowup_time=exc.time)

    if tp is not None and fit is None and len(series) >= 3:
        fit = gronwall_monitor(series, tp)

    if termination.startswith("blowup"):
        status = "blowup"
    elif fit is not None and not fit.bound_satisfied:
        status = "bound_violated"
    else:
        status = "completed"
    exit_code = EXIT_CODES[status]

    write_series_csv(series, out / "series.csv")
    files = ["series.csv"]
    if fit is not None:
        write_json({"convention": GRONWALL_CONVENTION, "theorem": asdict(tp), **fit.as_dict()}, out / "gronwall.json")
        files.append("gronwall.json")
    if config.svg and len(series) > 1:
        write_energy_svg(series, out / "energy.svg", fit.bound if fit else None, fit.T0 if fit else None)
        files.append("energy.svg")
    finished = time.time()
    metadata = {
        "config": config.to_dict(),
        "code_version": __version__,
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
        "rng": RNG_NAME,
        "wall_clock": {"start": started, "end": finished, "elapsed_s": finished - started},
        "status": status,
        "termination": termination,
        "exit_code": exit_code,
        "steps": series.metadata.get("steps"),
        "final_time": state.time,
        "sobolev_s": s,
        "theorem": asdict(tp) if tp else None,
        "snapshots": snaps.written,
        "files": files,
    }
    write_json(metadata, out / "metadata.json")
    return RunResult(out, status, termination, exit_code, series, state, tp, fit)


# -- sweeps ---------------------------------------------------------------

SWEEP_COLUMNS = (
    "alpha",
    "beta",
    "seed",
    "alpha_plus_beta",
    "exploration",
    "status",
    "termination",
    "max_growth",
    "C_hat",
    "T0",
    "bound_satisfied",
    "run_dir",
    "error",
)


def _sweep_point(config: RunConfig) -> dict:
    p = config.params
    row = {
        "alpha": p.alpha,
        "beta": p.beta,
        "seed": config.seed,
        "alpha_plus_beta": p.alpha + p.beta,
        "exploration": not p.theorem_mode,
        "run_dir": config.output_dir,
        "status": "error",
        "termination": "",
        "max_growth": math.nan,
        "C_hat": math.nan,
        "T0": math.nan,
        "bound_satisfied": "",
        "error": "",
    }
    try:
        res = run(config)
    except Exception as exc:  # one failed point must not abort the sweep
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    E = res.series.column("E_s")
    row.update(status=res.status, termination=res.termination)
    if E.size and E[0] > 0:
        row["max_growth"] = float(np.max(E) / E[0])
    if res.fit is not None:
        row.update(C_hat=res.fit.C_hat, T0=res.fit.T0, bound_satisfied=res.fit.bound_satisfied)
    return row


def sweep_configs(
    base: RunConfig,
    alphas: Sequence[float],
    betas: Sequence[float],
    seeds: Sequence[int],
    output_dir: str | Path,
) -> list[RunConfig]:
    out = Path(output_dir)
    configs = []
    for alpha in alphas:
        for beta in betas:
            exploration = alpha + beta <= 2.0
            params = replace(base.params, alpha=alpha, beta=beta, exploration=exploration or base.params.exploration)
            for seed in seeds:
                name = f"alpha{alpha:g}_beta{beta:g}_seed{seed}"
                configs.append(replace(base, params=params, seed=seed, output_dir=str(out / name)))
    return configs


def sweep(
    base: RunConfig,
    alphas: Sequence[float],
    betas: Sequence[float],
    seeds: Sequence[int],
    output_dir: str | Path | None = None,
    workers: int = 1,
) -> list[dict]:
    """One row per (alpha, beta, seed); writes ``summary.csv`` plus per-run directories.

    Points with alpha + beta <= 2 run in exploration mode and are flagged.
    """
    if not (alphas and betas and seeds):
        raise ValueError("alpha, beta and seed lists must be nonempty")
    out = Path(output_dir or base.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    configs = sweep_configs(base, alphas, betas, seeds, out)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, configs))
    else:
        rows = [_sweep_point(c) for c in configs]
    with open(out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return rows


# -- resolution studies ---------------------------------------------------


def _common_modes(n_small: int, n_big: int) -> tuple[np.ndarray, np.ndarray]:
    cut = n_small // 3
    k = np.r_[0 : cut + 1, -cut:0]
    return k % n_small, k % n_big


def common_mode_difference(s1: EmhdState, s2: EmhdState) -> float:
    """H^1 x L^2 norm of the difference on the smaller grid's Galerkin modes."""
    n1, n2 = s1.grid.n, s2.grid.n
    if n1 > n2:
        s1, s2, n1, n2 = s2, s1, n2, n1
    i1, i2 = _common_modes(n1, n2)
    da = s1.a.coeffs[np.ix_(i1, i1)] - s2.a.coeffs[np.ix_(i2, i2)]
    db = s1.b.coeffs[np.ix_(i1, i1)] - s2.b.coeffs[np.ix_(i2, i2)]
    k2 = s1.grid.kmag()[np.ix_(i1, i1)] ** 2
    return math.sqrt(AREA * float(np.sum(k2 * np.abs(da) ** 2 + np.abs(db) ** 2)))


def shell_spectrum(state: EmhdState) -> tuple[np.ndarray, np.ndarray]:
    """Per integer shell round(|k|): sqrt(sum |k|^2 |a_k|^2 + |b_k|^2)."""
    shell = np.rint(state.grid.kmag()).astype(int)
    dens = state.grid.kmag() ** 2 * np.abs(state.a.coeffs) ** 2 + np.abs(state.b.coeffs) ** 2
    mask = state.grid.galerkin_mask()
    kmax = int(shell[mask].max())
    amp = np.sqrt(np.bincount(shell[mask], weights=dens[mask], minlength=kmax + 1))
    return np.arange(kmax + 1), amp


def convergence_study(
    base: RunConfig,
    resolutions: Sequence[int],
    output_dir: str | Path | None = None,
) -> dict:
    """Self-convergence of the Galerkin truncation under grid refinement.

    Every resolution integrates the same band-limited data with the same fixed
    step.  Reports common-mode differences between consecutive resolutions,
    differences against the finest one, observed rates, and shell spectra.
    """
    if len(resolutions) < 3:
        raise ValueError("need at least 3 resolutions")
    grids = [GridSpec(int(n)) for n in resolutions]
    smallest = min(grids, key=lambda g: g.n)
    try:
        check_band(base.initial_data, smallest)
    except InvalidBand as exc:
        raise InvalidBand(f"initial data not representable at n={smallest.n}: {exc}") from exc
    icfg = replace(base.integrator, adaptive=False, observer_stride=10**9)
    finals = []
    for g in grids:
        st0 = make_initial_data(base.initial_data, g, base.seed)
        st, _ = integrate(st0, base.params, icfg)
        finals.append(st)
    pairs = [common_mode_difference(finals[i], finals[i + 1]) for i in range(len(finals) - 1)]
    to_finest = [common_mode_difference(st, finals[-1]) for st in finals[:-1]]
    rates = []
    for i in range(len(pairs) - 1):
        ratio = grids[i + 2].n / grids[i + 1].n
        ok = pairs[i] > 0 and pairs[i + 1] > 0 and ratio != 1
        rates.append(math.log(pairs[i] / pairs[i + 1]) / math.log(ratio) if ok else math.nan)
    spectra = {g.n: shell_spectrum(st) for g, st in zip(grids, finals)}
    report = {
        "resolutions": [g.n for g in grids],
        "t_end": base.integrator.t_end,
        "dt": base.integrator.dt,
        "pair_differences": pairs,
        "differences_to_finest": to_finest,
        "observed_rates": rates,
        "monotone": all(pairs[i] > pairs[i + 1] for i in range(len(pairs) - 1)),
    }
    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_json(report, out / "convergence.json")
        with open(out / "spectra.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "k_shell", "amplitude"])
            for n, (ks, amp) in spectra.items():
                for k, a in zip(ks, amp):
                    w.writerow([n, int(k), repr(float(a))])
    report["spectra"] = {n: (ks.tolist(), amp.tolist()) for n, (ks, amp) in spectra.items()}
    return report


__all__ = [
    "EXIT_CODES",
    "RunResult",
    "run",
    "sweep",
    "convergence_study",
    "integrate_until_T0",
    "common_mode_difference",
]
