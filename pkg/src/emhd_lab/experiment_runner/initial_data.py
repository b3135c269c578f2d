"""Reproducible initial conditions."""

from __future__ import annotations

import numpy as np

from ..emhd_rhs import EmhdState
from ..errors import InvalidBand
from ..spectral_core import GridSpec, SpectralField, random_band_field
from .config import InitialDataSpec

RNG_NAME = "numpy.random.Generator(PCG64)"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


# cos(k.x) has coefficient 1/2 at +k and -k; tables list one of each pair
_PRESET_MODES = {
    "zero": ({}, {}),
    "cosx": ({(1, 0): 0.5}, {}),
    "cosx_cos2y": ({(1, 0): 0.5, (0, 2): 0.5}, {}),
    "cosx_cosy": ({(1, 0): 0.5, (0, 1): 0.5}, {}),
    "cosx_b_cosy": ({(1, 0): 0.5}, {(0, 1): 0.5}),
}


def _from_modes(grid: GridSpec, table: dict) -> SpectralField:
    n = grid.n
    c = np.zeros((n, n), dtype=complex)
    for (kx, ky), val in table.items():
        c[ky % n, kx % n] = val
        c[-ky % n, -kx % n] = np.conj(val)
    return SpectralField(grid, c)


def _preset(kind: str, grid: GridSpec) -> tuple[SpectralField, SpectralField]:
    """Closed-form trigonometric data, set coefficient by coefficient (no sampling error)."""
    ta, tb = _PRESET_MODES[kind]
    return _from_modes(grid, ta), _from_modes(grid, tb)


def check_band(spec: InitialDataSpec, grid: GridSpec):
    if spec.kind != "random_band":
        return
    if not 0 <= spec.k_min <= spec.k_max <= grid.dealias_cutoff:
        raise InvalidBand(
            f"need 0 <= k_min <= k_max <= {grid.dealias_cutoff} on n={grid.n}, got [{spec.k_min}, {spec.k_max}]"
        )


def make_initial_data(spec: InitialDataSpec, grid: GridSpec, seed: int) -> EmhdState:
    """Deterministic in (spec, seed); random bands are also independent of the grid size."""
    if spec.kind != "random_band":
        a, b = _preset(spec.kind, grid)
        return EmhdState(a, b, 0.0)
    check_band(spec, grid)
    rng = make_rng(seed)
    amp_b = spec.amplitude if spec.amplitude_b is None else spec.amplitude_b
    k_min = max(spec.k_min, 1)
    a = random_band_field(grid, rng, k_min, spec.k_max, spec.spectrum_exponent, spec.amplitude)
    b = random_band_field(grid, rng, k_min, spec.k_max, spec.spectrum_exponent, amp_b)
    return EmhdState(a, b, 0.0)
