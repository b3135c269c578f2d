"""Integrating-factor RK4 for the Galerkin EMHD system.

The dissipation ``-nu |k|^s`` is diagonal, so it is propagated exactly by the
factors ``exp(-nu |k|^s dt)``; the classical RK4 tableau acts on the
quadratic terms in the transformed variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .diagnostics import DiagnosticsSeries, EnergyRecord, energy_record
from .emhd_rhs import EmhdParams, EmhdState, linear_rates, nonlinear_tendency
from .errors import BlowupDetected, InvalidParameters
from .spectral_core import SpectralField, inverse_transform, partial_x, partial_y

Observer = Callable[[EmhdState, EnergyRecord], None]


@dataclass(frozen=True)
class IntegratorConfig:
    """Step control.

    With ``adaptive=False`` the run takes ``ceil(t_end / dt)`` equal steps of
    size ``t_end / nsteps`` (never larger than ``dt``).  With ``adaptive=True``
    each step uses ``choose_dt`` capped by ``dt_max`` and the time remaining.
    """

    dt: float
    t_end: float
    cfl_safety: float = 0.4
    max_steps: int = 1_000_000
    blowup_threshold: float = 1e8
    adaptive: bool = False
    dt_max: float = 1e-2
    observer_stride: int = 1
    sobolev_s: float = 2.0

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParameters(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise InvalidParameters(f"t_end must be nonnegative, got {self.t_end}")
        if not 0 < self.cfl_safety <= 1:
            raise InvalidParameters(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if self.max_steps < 1 or self.observer_stride < 1:
            raise InvalidParameters("max_steps and observer_stride must be positive")


class _Factors:
    """exp(-L dt) and exp(-L dt/2) for one step size, reused while dt is unchanged."""

    def __init__(self, grid, params: EmhdParams):
        self.ra, self.rb = linear_rates(grid, params)
        self.dt = None

    def get(self, dt: float):
        if dt != self.dt:
            self.dt = dt
            self.full = (np.exp(-self.ra * dt), np.exp(-self.rb * dt))
            self.half = (np.exp(-self.ra * dt / 2), np.exp(-self.rb * dt / 2))
        return self.full, self.half


def _nl(a: np.ndarray, b: np.ndarray, grid, params: EmhdParams):
    if not params.nonlinear:
        return 0.0, 0.0
    t = nonlinear_tendency(EmhdState(SpectralField(grid, a), SpectralField(grid, b)))
    return t.da_dt.coeffs, t.db_dt.coeffs


def _ifrk4(state: EmhdState, params: EmhdParams, dt: float, factors: _Factors) -> EmhdState:
    # overflow is detected explicitly below, so numpy need not warn about it
    with np.errstate(over="ignore", invalid="ignore"):
        return _ifrk4_stages(state, params, dt, factors)


def _ifrk4_stages(state: EmhdState, params: EmhdParams, dt: float, factors: _Factors) -> EmhdState:
    grid = state.grid
    (ea, eb), (ha, hb) = factors.get(dt)
    a, b = state.a.coeffs, state.b.coeffs
    k1a, k1b = _nl(a, b, grid, params)
    k2a, k2b = _nl(ha * (a + 0.5 * dt * k1a), hb * (b + 0.5 * dt * k1b), grid, params)
    k3a, k3b = _nl(ha * a + 0.5 * dt * k2a, hb * b + 0.5 * dt * k2b, grid, params)
    k4a, k4b = _nl(ea * a + dt * ha * k3a, eb * b + dt * hb * k3b, grid, params)
    new_a = ea * a + dt / 6.0 * (ea * k1a + 2.0 * ha * (k2a + k3a) + k4a)
    new_b = eb * b + dt / 6.0 * (eb * k1b + 2.0 * hb * (k2b + k3b) + k4b)
    t_new = state.time + dt
    if not (np.all(np.isfinite(new_a)) and np.all(np.isfinite(new_b))):
        raise BlowupDetected(t_new, "nonfinite", state=state)
    return EmhdState(SpectralField(grid, new_a), SpectralField(grid, new_b), t_new)


def step(state: EmhdState, params: EmhdParams, dt: float) -> EmhdState:
    """One integrating-factor RK4 step."""
    if not dt > 0:
        raise InvalidParameters(f"dt must be positive, got {dt}")
    return _ifrk4(state, params, dt, _Factors(state.grid, params))


def choose_dt(
    state: EmhdState,
    params: EmhdParams,
    cfl_safety: float = 0.4,
    dt_max: float = 1e-2,
    eps_guard: float = 1e-12,
) -> float:
    """Whistler-type step limit ``cfl_safety / (max|grad a| * kmax^2 + eps_guard)``.

    ``kmax = sqrt(2) * dealias_cutoff`` is the largest Euclidean wavenumber in
    the Galerkin space and ``max|grad a|`` is taken over the collocation grid.
    Heuristic; capped by ``dt_max``.
    """
    grid = state.grid
    gx = inverse_transform(partial_x(state.a)).samples
    gy = inverse_transform(partial_y(state.a)).samples
    speed = float(np.max(np.hypot(gx, gy)))
    return min(dt_max, cfl_safety / (speed * grid.kmax_euclid**2 + eps_guard))


def integrate(
    state0: EmhdState,
    params: EmhdParams,
    config: IntegratorConfig,
    observers: Sequence[Observer] = (),
) -> tuple[EmhdState, DiagnosticsSeries]:
    """Advance to ``config.t_end`` and record diagnostics every ``observer_stride`` steps.

    The final state is always recorded.  ``series.metadata['termination']`` is
    ``"completed"`` or ``"max_steps"``; blow-up (non-finite values or
    ``E_s > blowup_threshold``) raises :class:`BlowupDetected` carrying the
    last finite state and the series so far.
    """
    s = config.sobolev_s
    series = DiagnosticsSeries(metadata={"scheme": "IFRK4", "sobolev_s": s})
    factors = _Factors(state0.grid, params)

    def observe(st: EmhdState) -> EnergyRecord:
        rec = energy_record(st, s, params)
        series.append(rec)
        for obs in observers:
            obs(st, rec)
        return rec

    rec = observe(state0)
    state = state0
    t0, t_end = state0.time, state0.time + config.t_end
    if config.adaptive:
        nsteps_fixed, dt_fixed = None, None
    else:
        nsteps_fixed = math.ceil(config.t_end / config.dt * (1 - 1e-12)) if config.t_end > 0 else 0
        dt_fixed = config.t_end / nsteps_fixed if nsteps_fixed else 0.0

    steps = 0
    termination = "completed"
    while True:
        if config.adaptive:
            remaining = t_end - state.time
            if remaining <= 1e-14 * max(1.0, abs(t_end)):
                break
            dt = min(remaining, choose_dt(state, params, config.cfl_safety, config.dt_max))
        else:
            if steps >= nsteps_fixed:
                break
            dt = dt_fixed
        if steps >= config.max_steps:
            termination = "max_steps"
            break
        try:
            new = _ifrk4(state, params, dt, factors)
        except BlowupDetected as exc:
            exc.series = series
            raise
        if not config.adaptive:
            # avoid accumulated rounding in t
            new = EmhdState(new.a, new.b, t0 + (steps + 1) * dt_fixed)
        state = new
        steps += 1
        last = (not config.adaptive and steps == nsteps_fixed) or (
            config.adaptive and t_end - state.time <= 1e-14 * max(1.0, abs(t_end))
        )
        if steps % config.observer_stride == 0 or last:
            rec = observe(state)
            if not math.isfinite(rec.E_s) or rec.E_s > config.blowup_threshold:
                raise BlowupDetected(state.time, "threshold", state=state, series=series)
    if series.records[-1].time != state.time:
        observe(state)
    series.metadata.update(termination=termination, steps=steps)
    return state, series
