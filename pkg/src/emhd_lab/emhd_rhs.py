"""Galerkin-truncated 2.5D electron-MHD vector field.

    a_t = -(a_y b_x - a_x b_y) - nu_a Lambda^alpha a
    b_t = +(a_y Lap a_x - a_x Lap a_y) - nu_b Lambda^beta b

with ``B = (a_y, -a_x, b)``.  Products are evaluated on the 3/2-padded grid,
so the truncated system keeps the continuous invariants

    <N_a, Lap a> + <N_b, b> = 0,   <N_a, b> = 0,   <N_b, a> = 0,

where ``N_a = a_y b_x - a_x b_y`` and ``N_b = a_y Lap a_x - a_x Lap a_y``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, InvalidParameters, ThresholdViolated
from .spectral_core import (
    RealField,
    SpectralField,
    frac_symbol,
    from_padded_physical,
    inner,
    inverse_transform,
    laplacian,
    partial_x,
    partial_y,
    to_padded_physical,
)


@dataclass(frozen=True)
class EmhdParams:
    """Dissipation exponents and strengths.

    ``exploration=True`` admits alpha + beta <= 2 (threshold sweeps);
    ``nonlinear=False`` switches the quadratic terms off.
    """

    alpha: float
    beta: float
    nu_a: float = 1.0
    nu_b: float = 1.0
    exploration: bool = False
    nonlinear: bool = True

    def __post_init__(self):
        if not (0.0 < self.alpha < 2.0 and 0.0 < self.beta < 2.0):
            raise InvalidParameters(f"need 0 < alpha, beta < 2, got alpha={self.alpha}, beta={self.beta}")
        if self.nu_a < 0 or self.nu_b < 0:
            raise InvalidParameters("dissipation strengths must be nonnegative")
        if not self.exploration and self.alpha + self.beta <= 2.0:
            raise ThresholdViolated(
                f"alpha + beta = {self.alpha + self.beta} <= 2; pass exploration=True to allow it"
            )

    @property
    def theorem_mode(self) -> bool:
        return self.alpha + self.beta > 2.0


@dataclass(frozen=True)
class EmhdState:
    a: SpectralField
    b: SpectralField
    time: float = 0.0

    def __post_init__(self):
        if self.a.grid != self.b.grid:
            raise GridMismatch(f"{self.a.grid} vs {self.b.grid}")

    @property
    def grid(self):
        return self.a.grid

    @classmethod
    def zeros(cls, grid, time=0.0):
        z = SpectralField.zeros(grid)
        return cls(z, z, time)


@dataclass(frozen=True)
class Tendency:
    da_dt: SpectralField
    db_dt: SpectralField


def nonlinear_a(a: SpectralField, b: SpectralField) -> SpectralField:
    """a_y b_x - a_x b_y."""
    if a.grid != b.grid:
        raise GridMismatch(f"{a.grid} vs {b.grid}")
    ax, ay = to_padded_physical(partial_x(a)), to_padded_physical(partial_y(a))
    bx, by = to_padded_physical(partial_x(b)), to_padded_physical(partial_y(b))
    return from_padded_physical(ay * bx - ax * by, a.grid)


def nonlinear_b(a: SpectralField) -> SpectralField:
    """a_y Lap a_x - a_x Lap a_y."""
    la = laplacian(a)
    ax, ay = to_padded_physical(partial_x(a)), to_padded_physical(partial_y(a))
    lax, lay = to_padded_physical(partial_x(la)), to_padded_physical(partial_y(la))
    return from_padded_physical(ay * lax - ax * lay, a.grid)


def nonlinear_tendency(state: EmhdState) -> Tendency:
    """Quadratic part of the vector field only: (-N_a, +N_b)."""
    a, b = state.a, state.b
    grid = a.grid
    ax, ay = to_padded_physical(partial_x(a)), to_padded_physical(partial_y(a))
    bx, by = to_padded_physical(partial_x(b)), to_padded_physical(partial_y(b))
    la = laplacian(a)
    lax, lay = to_padded_physical(partial_x(la)), to_padded_physical(partial_y(la))
    na = from_padded_physical(ay * bx - ax * by, grid)
    nb = from_padded_physical(ay * lax - ax * lay, grid)
    return Tendency(-na, nb)


def linear_rates(grid, params: EmhdParams) -> tuple[np.ndarray, np.ndarray]:
    """Decay rates nu_a |k|^alpha and nu_b |k|^beta on the lattice."""
    return params.nu_a * frac_symbol(grid, params.alpha), params.nu_b * frac_symbol(grid, params.beta)


def full_rhs(state: EmhdState, params: EmhdParams) -> Tendency:
    ra, rb = linear_rates(state.grid, params)
    da = -ra * state.a.coeffs
    db = -rb * state.b.coeffs
    if params.nonlinear:
        nl = nonlinear_tendency(state)
        da = da + nl.da_dt.coeffs
        db = db + nl.db_dt.coeffs
    grid = state.grid
    return Tendency(SpectralField(grid, da), SpectralField(grid, db))


def magnetic_field(state: EmhdState) -> tuple[RealField, RealField, RealField]:
    """Collocation samples of B = (a_y, -a_x, b)."""
    bx = inverse_transform(partial_y(state.a))
    by = inverse_transform(-partial_x(state.a))
    return bx, by, inverse_transform(state.b)


@dataclass(frozen=True)
class ConservedQuantities:
    energy: float
    helicity: float
    mean_a: float
    mean_b: float


def energy(state: EmhdState) -> float:
    """1/2 (||grad a||^2 + ||b||^2)."""
    a = state.a
    return 0.5 * (inner(partial_x(a), partial_x(a)) + inner(partial_y(a), partial_y(a)) + inner(state.b, state.b))


def helicity(state: EmhdState) -> float:
    """Integral of a * b over the torus."""
    return inner(state.a, state.b)


def conserved_quantities(state: EmhdState) -> ConservedQuantities:
    return ConservedQuantities(
        energy=energy(state),
        helicity=helicity(state),
        mean_a=state.a.mean,
        mean_b=state.b.mean,
    )


def energy_rate_terms(state: EmhdState) -> tuple[float, float]:
    """Nonlinear contributions (from a, from b) to d/dt energy; they cancel."""
    nl = nonlinear_tendency(state)
    return -inner(nl.da_dt, laplacian(state.a)), inner(nl.db_dt, state.b)


def helicity_rate_terms(state: EmhdState) -> tuple[float, float]:
    """Nonlinear contributions <a_t, b> and <a, b_t> to d/dt helicity."""
    nl = nonlinear_tendency(state)
    return inner(nl.da_dt, state.b), inner(state.a, nl.db_dt)
