"""Dyadic energy functionals, the Gronwall monitor and the low-high cancellation.

Conventions
-----------
E_s = sum_q 4^{qs} (||Lambda Delta_q a||^2 + ||Delta_q b||^2)
D_s = sum_q 4^{qs} (||Lambda^{1+alpha/2} Delta_q a||^2 + ||Lambda^{beta/2} Delta_q b||^2)

Along the linear flow ``d/dt E_s = -2 D_s``.  The monitor therefore fits
``C_hat`` in ``d/dt E_s + 2 D_s <= C_hat * E_s^(1+gamma)``; dropping the
dissipation gives ``d/dt E_s <= C_hat E_s^(1+gamma)``, so ``C_hat`` plugs
directly into the existence time ``T0 = 1 / (2 gamma C_hat (1 + E_s(0))^gamma)``
and the comparison bound ``E_s(0) / (1 - gamma C_hat t E_s(0)^gamma)^(1/gamma)``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .emhd_rhs import EmhdParams, EmhdState, conserved_quantities
from .errors import (
    GridMismatch,
    InsufficientSamples,
    InvalidParameters,
    NonpositiveEnergy,
    ThresholdViolated,
)
from .littlewood_paley import (
    LPParams,
    bernstein_ratio,
    commutator_ratio,
    dyadic_block,
    low_cutoff,
    sobolev_weight,
)
from .spectral_core import (
    AREA,
    GridSpec,
    SpectralField,
    frac_symbol,
    from_padded_physical,
    inner,
    partial_x,
    partial_y,
    random_band_field,
    to_padded_physical,
)


@dataclass(frozen=True)
class TheoremParams:
    alpha: float
    beta: float
    s: float
    theta: float
    epsilon: float
    gamma: float

    @property
    def theta_upper(self) -> float:
        return 1.0 - 2.0 / (self.alpha + self.beta)

    @property
    def s_min(self) -> float:
        return 2.0 - self.epsilon

    @property
    def growth_factor(self) -> float:
        """2^{1/gamma} = 2^{2 theta}: admissible growth of E_s on [0, T0]."""
        return 2.0 ** (2.0 * self.theta)


def select_theorem_params(
    alpha: float,
    beta: float,
    s_requested: float | None = None,
    theta: float | None = None,
) -> TheoremParams:
    """Pick (theta, epsilon, gamma, s) for exponents in the well-posedness region.

    theta defaults to the midpoint of (0, 1 - 2/(alpha+beta)); s is raised to
    2 - epsilon if the request is lower.
    """
    if not (0.0 < alpha < 2.0 and 0.0 < beta < 2.0):
        raise InvalidParameters(f"need 0 < alpha, beta < 2, got {alpha}, {beta}")
    total = alpha + beta
    if total <= 2.0:
        raise ThresholdViolated(f"alpha + beta = {total} <= 2: no admissible theta")
    upper = 1.0 - 2.0 / total
    if theta is None:
        theta = 0.5 * upper
    elif not 0.0 < theta < upper:
        raise InvalidParameters(f"theta={theta} outside (0, {upper})")
    epsilon = 0.5 * (1.0 - theta) * total - 1.0
    gamma = 1.0 / (2.0 * theta)
    s_min = 2.0 - epsilon
    if s_requested is None:
        s = s_min
    elif s_requested < s_min:
        warnings.warn(f"s={s_requested} below 2 - epsilon = {s_min}; using {s_min}", stacklevel=2)
        s = s_min
    else:
        s = float(s_requested)
    return TheoremParams(alpha, beta, s, theta, epsilon, gamma)


# -- energy functionals ---------------------------------------------------


def _weighted_sum(weight: np.ndarray, coeffs: np.ndarray) -> float:
    return AREA * float(np.sum(weight * (coeffs.real**2 + coeffs.imag**2)))


def energy_functional(state: EmhdState, s: float) -> float:
    grid = state.grid
    w = sobolev_weight(grid, s)
    k2 = grid.kmag() ** 2
    return _weighted_sum(w * k2, state.a.coeffs) + _weighted_sum(w, state.b.coeffs)


def dissipation_functional(state: EmhdState, s: float, alpha: float, beta: float) -> float:
    grid = state.grid
    w = sobolev_weight(grid, s)
    return _weighted_sum(w * frac_symbol(grid, 2.0 + alpha), state.a.coeffs) + _weighted_sum(
        w * frac_symbol(grid, beta), state.b.coeffs
    )


@dataclass(frozen=True)
class EnergyRecord:
    time: float
    E_s: float
    D_s: float
    energy: float
    helicity: float
    mean_a: float
    mean_b: float


def energy_record(state: EmhdState, s: float, params: EmhdParams) -> EnergyRecord:
    cq = conserved_quantities(state)
    return EnergyRecord(
        time=float(state.time),
        E_s=energy_functional(state, s),
        D_s=dissipation_functional(state, s, params.alpha, params.beta),
        energy=cq.energy,
        helicity=cq.helicity,
        mean_a=cq.mean_a,
        mean_b=cq.mean_b,
    )


SERIES_COLUMNS = ("t", "E_s", "D_s", "energy", "helicity", "mean_a", "mean_b")


@dataclass
class DiagnosticsSeries:
    """Time-ordered energy records plus free-form metadata."""

    records: list[EnergyRecord] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def append(self, rec: EnergyRecord):
        if self.records and rec.time <= self.records[-1].time:
            raise ValueError(f"non-increasing time {rec.time} after {self.records[-1].time}")
        self.records.append(rec)

    def __len__(self):
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        attr = "time" if name == "t" else name
        return np.array([getattr(r, attr) for r in self.records], dtype=float)

    def rows(self) -> Iterable[tuple]:
        for r in self.records:
            yield (r.time, r.E_s, r.D_s, r.energy, r.helicity, r.mean_a, r.mean_b)


# -- Gronwall monitor -----------------------------------------------------


@dataclass(frozen=True)
class GronwallFit:
    C_hat: float
    T0: float
    bound_satisfied: bool
    margin: float
    E0: float
    bound: float
    max_growth: float
    covers_T0: bool
    regularized: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def centered_derivative(t: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Second-order three-point derivative at interior samples (any spacing)."""
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    # written in differences so a constant series gives exactly zero
    return (h2 * (f[1:-1] - f[:-2]) / h1 + h1 * (f[2:] - f[1:-1]) / h2) / (h1 + h2)


def gronwall_monitor(
    series: DiagnosticsSeries,
    tp: TheoremParams,
    tol: float = 0.05,
    delta: float = 1e-30,
    regularize: bool = True,
) -> GronwallFit:
    """Fit the growth constant of E_s and test the bound E_s <= 2^{2 theta} E_s(0) on [0, T0]."""
    if len(series) < 3:
        raise InsufficientSamples(f"need at least 3 samples, got {len(series)}")
    t = series.column("t")
    E = series.column("E_s")
    D = series.column("D_s")
    regularized = False
    if E[0] <= 0.0:
        if not regularize:
            raise NonpositiveEnergy("E_s(0) = 0")
        E = E + delta
        regularized = True
    g = tp.gamma
    resid = centered_derivative(t, E) + 2.0 * D[1:-1]
    ratios = np.maximum(resid, 0.0) / E[1:-1] ** (1.0 + g)
    C_hat = float(np.max(ratios))
    E0 = float(E[0])
    T0 = 1.0 / (2.0 * g * C_hat * (1.0 + E0) ** g) if C_hat > 0 else math.inf
    window = t <= min(T0, t[-1])
    bound = (1.0 + tol) * tp.growth_factor * E0
    satisfied = bool(np.all(E[window] <= bound))
    denom = 1.0 - g * C_hat * t[window] * E0**g
    comparison = E0 / denom ** (1.0 / g)
    margin = float(np.max(E[window] / comparison))
    return GronwallFit(
        C_hat=C_hat,
        T0=T0,
        bound_satisfied=satisfied,
        margin=margin,
        E0=E0,
        bound=bound,
        max_growth=float(np.max(E[window]) / E0),
        covers_T0=bool(t[-1] >= T0),
        regularized=regularized,
    )


# -- cancellation of the leading low-high terms ---------------------------


def _triple(f: SpectralField, g: SpectralField, h: SpectralField) -> float:
    """Integral of f * g * h for band-limited fields (exact)."""
    fg = from_padded_physical(to_padded_physical(f) * to_padded_physical(g), f.grid)
    return inner(fg, h)


def cancellation_terms(a: SpectralField, b: SpectralField, s: float) -> tuple[float, float]:
    """The two low-high sums whose total vanishes identically.

    first  = -sum_q sum_{|p-q|<=2} 4^{qs} int S_{q-2}a_y * Delta_q Delta_p b_x * Delta_q Lambda^2 a
    second = +sum_q sum_{|p-q|<=2} 4^{qs} int S_{q-2}a_y * Delta_q Delta_p Lambda^2 a * Delta_q b_x
    """
    if a.grid != b.grid:
        raise GridMismatch(f"{a.grid} vs {b.grid}")
    grid = a.grid
    lp = LPParams(grid)
    ay = partial_y(a)
    bx = partial_x(b)
    lap_a = SpectralField(grid, frac_symbol(grid, 2.0) * a.coeffs)
    first = second = 0.0
    for q in lp.shells:
        weight = 2.0 ** (2 * q * s)
        low = low_cutoff(ay, q - 2)
        if not np.any(low.coeffs):
            continue
        dq_bx = dyadic_block(bx, q)
        dq_lap = dyadic_block(lap_a, q)
        for p in range(max(-1, q - 2), q + 3):
            first -= weight * _triple(low, dyadic_block(dq_bx, p), dq_lap)
            second += weight * _triple(low, dyadic_block(dq_lap, p), dq_bx)
    return first, second


def cancellation_check(a: SpectralField, b: SpectralField, s: float, guard: float = 1e-300) -> float:
    """Normalized residual |I + J| / (|I| + |J| + guard) of the two low-high sums."""
    first, second = cancellation_terms(a, b, s)
    return abs(first + second) / (abs(first) + abs(second) + guard)


# -- empirical constants --------------------------------------------------

# Forward cases are (m, p, r); reverse cases are (m, r).
BERNSTEIN_FORWARD = ((0, 2, math.inf), (1, 2, 2), (1, 2, math.inf), (1, 1, 2), (2, 2, 2))
BERNSTEIN_REVERSE = ((1, 2), (1, math.inf), (2, 2))
COMMUTATOR_SMOOTHNESS = (0.5, 1.0, 2.0)

# Per-grid maxima over the reference seeds, written by scripts/measure_constants.py.
FROZEN_PATH = Path(__file__).with_name("data") / "frozen_constants.json"
REFERENCE_SEEDS = 100


def load_frozen_constants() -> dict:
    """Frozen per-grid constants, a ``"bound"`` entry with the max over grids, and the
    norm-equivalence interval per Sobolev index (measured at n=64)."""
    per_grid = json.loads(FROZEN_PATH.read_text())
    norm_eq = per_grid.pop("norm_equivalence", {})
    bound: dict = {"bernstein_forward": {}, "bernstein_reverse": {}, "commutator": 0.0}
    for rep in per_grid.values():
        for group in ("bernstein_forward", "bernstein_reverse"):
            for key, val in rep[group].items():
                bound[group][key] = max(bound[group].get(key, 0.0), val)
        bound["commutator"] = max(bound["commutator"], rep["commutator"])
    return {"per_grid": per_grid, "bound": bound, "norm_equivalence": norm_eq}


CONSTANT_SLACK = 1.2


def _case_key(case) -> str:
    return ",".join("inf" if math.isinf(x) else str(x) for x in case)


def reference_field(grid: GridSpec, seed: int) -> SpectralField:
    """Full-band random field used for constant measurements."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return random_band_field(grid, rng, k_min=0, k_max=grid.dealias_cutoff, spectrum_exponent=1.0)


def empirical_constant_suite(seed_count: int, grid: GridSpec, first_seed: int = 0) -> dict:
    """Measure Bernstein and commutator ratios over random fields.

    Bernstein ratios use shells 1..q_max-2; commutator ratios use
    1 <= p <= q_max - 1 and every q with |p - q| <= 2.  Returns per-case
    maxima with a per-shell breakdown.
    """
    if seed_count < 10:
        raise ValueError("seed_count must be >= 10")
    lp = LPParams(grid)
    shells = range(1, lp.q_max - 1)
    fwd = {_case_key(c): {q: 0.0 for q in shells} for c in BERNSTEIN_FORWARD}
    rev = {_case_key(c): {q: 0.0 for q in shells} for c in BERNSTEIN_REVERSE}
    comm: dict[tuple[int, int], float] = {}
    for seed in range(first_seed, first_seed + seed_count):
        u = reference_field(grid, 2 * seed)
        v = reference_field(grid, 2 * seed + 1)
        for q in shells:
            for c in BERNSTEIN_FORWARD:
                key = _case_key(c)
                fwd[key][q] = max(fwd[key][q], bernstein_ratio(u, q, *c))
            for m, r in BERNSTEIN_REVERSE:
                key = _case_key((m, r))
                rev[key][q] = max(rev[key][q], bernstein_ratio(u, q, m, r, r, reverse=True))
        s_exp = COMMUTATOR_SMOOTHNESS[seed % len(COMMUTATOR_SMOOTHNESS)]
        for p in range(1, lp.q_max):
            for q in range(max(-1, p - 2), min(lp.q_max, p + 2) + 1):
                ratio = commutator_ratio(u, v, p, q, s_exp)
                if not math.isnan(ratio):
                    comm[(p, q)] = max(comm.get((p, q), 0.0), ratio)
    return {
        "grid": grid.n,
        "seeds": [first_seed, first_seed + seed_count],
        "bernstein_forward": {k: max(v.values()) for k, v in fwd.items()},
        "bernstein_reverse": {k: max(v.values()) for k, v in rev.items()},
        "bernstein_forward_by_shell": fwd,
        "bernstein_reverse_by_shell": rev,
        "commutator": max(comm.values()),
        "commutator_by_shell": {f"{p},{q}": r for (p, q), r in sorted(comm.items())},
    }


def compare_to_frozen(report: dict, frozen: dict | None = None, slack: float = CONSTANT_SLACK) -> dict:
    """Which measured maxima stay below slack * frozen bound."""
    if frozen is None:
        frozen = load_frozen_constants()["bound"]
    out = {}
    for group in ("bernstein_forward", "bernstein_reverse"):
        for key, val in report[group].items():
            out[f"{group}[{key}]"] = val <= slack * frozen[group][key]
    out["commutator"] = report["commutator"] <= slack * frozen["commutator"]
    return out
