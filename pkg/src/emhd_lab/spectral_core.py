"""Fourier substrate on the periodic square [0, 2*pi)^2.

Fields are stored as full (n, n) complex coefficient arrays in numpy FFT
ordering, rows indexed by ky and columns by kx, normalized so that

    u(x, y) = sum_k coeffs[ky, kx] * exp(i (kx x + ky y))

and ``coeffs[0, 0]`` is the mean of ``u``.  Every public operation returns
fields supported on the Galerkin space ``max(|kx|, |ky|) <= n // 3``
(2/3-rule truncation) and exactly Hermitian-symmetric.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import GridMismatch, InvalidField, InvalidGrid, NotRealField

TWO_PI = 2.0 * math.pi
AREA = TWO_PI**2

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Square periodic grid with ``n_per_axis`` collocation points per axis."""

    n_per_axis: int
    domain_length: float = TWO_PI

    def __post_init__(self):
        n = self.n_per_axis
        if not isinstance(n, (int, np.integer)) or n < 8 or n % 2:
            raise InvalidGrid(f"n_per_axis must be an even integer >= 8, got {n!r}")
        if self.domain_length != TWO_PI:
            raise InvalidGrid("only the 2*pi-periodic torus is supported")

    @property
    def n(self) -> int:
        return int(self.n_per_axis)

    @property
    def dealias_cutoff(self) -> int:
        return self.n // 3

    @property
    def padded_size(self) -> int:
        m = 3 * self.n // 2
        return m + m % 2

    @property
    def kmax_euclid(self) -> float:
        """Largest Euclidean |k| in the Galerkin space: sqrt(2) * cutoff."""
        return math.sqrt(2.0) * self.dealias_cutoff

    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer (kx, ky) arrays of shape (n, n)."""
        return _wavenumbers(self.n)

    def kmag(self) -> np.ndarray:
        return _kmag(self.n)

    def galerkin_mask(self) -> np.ndarray:
        return _mask(self.n)

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Collocation points (X, Y), ``X[iy, ix] = 2*pi*ix/n``."""
        x = TWO_PI * np.arange(self.n) / self.n
        return np.meshgrid(x, x, indexing="xy")


@functools.lru_cache(maxsize=None)
def _wavenumbers(n: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
    kx, ky = np.meshgrid(k, k, indexing="xy")
    kx.setflags(write=False)
    ky.setflags(write=False)
    return kx, ky


@functools.lru_cache(maxsize=None)
def _kmag(n: int) -> np.ndarray:
    kx, ky = _wavenumbers(n)
    out = np.sqrt((kx * kx + ky * ky).astype(float))
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=None)
def _mask(n: int) -> np.ndarray:
    kx, ky = _wavenumbers(n)
    cut = n // 3
    out = (np.abs(kx) <= cut) & (np.abs(ky) <= cut)
    out.setflags(write=False)
    return out


def _reflect(c: np.ndarray) -> np.ndarray:
    """Array whose entry at k is c(-k)."""
    return np.roll(c[::-1, ::-1], 1, axis=(0, 1))


def hermitian_part(c: np.ndarray) -> np.ndarray:
    return 0.5 * (c + np.conj(_reflect(c)))


def hermitian_error(c: np.ndarray) -> float:
    scale = float(np.max(np.abs(c))) if c.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(c - np.conj(_reflect(c))))) / scale


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a real scalar field on the torus."""

    grid: GridSpec
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.grid.n, self.grid.n):
            raise InvalidField(f"coefficient array has shape {c.shape}, expected {(self.grid.n,) * 2}")
        if c.flags.writeable:
            c = c.copy()
            c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SpectralField":
        return cls(grid, np.zeros((grid.n, grid.n), dtype=complex))

    @classmethod
    def constant(cls, grid: GridSpec, value: float) -> "SpectralField":
        c = np.zeros((grid.n, grid.n), dtype=complex)
        c[0, 0] = value
        return cls(grid, c)

    @classmethod
    def from_function(cls, grid: GridSpec, func: Callable) -> "SpectralField":
        """Sample ``func(X, Y)`` on the grid and transform."""
        X, Y = grid.coordinates()
        return forward_transform(RealField(grid, np.asarray(func(X, Y), dtype=float) + 0.0 * X))

    @property
    def mean(self) -> float:
        return float(self.coeffs[0, 0].real)

    def mode(self, kx: int, ky: int) -> complex:
        n = self.grid.n
        return complex(self.coeffs[ky % n, kx % n])

    def hermitian_error(self) -> float:
        return hermitian_error(self.coeffs)

    def leakage(self) -> float:
        """Largest coefficient magnitude outside the Galerkin space."""
        outside = self.coeffs[~self.grid.galerkin_mask()]
        return float(np.max(np.abs(outside))) if outside.size else 0.0

    def _check(self, other: "SpectralField"):
        if other.grid != self.grid:
            raise GridMismatch(f"{self.grid} vs {other.grid}")

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs)

    def __mul__(self, scalar):
        if isinstance(scalar, SpectralField):
            raise TypeError("use dealiased_product for field products")
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class RealField:
    """Samples of a real field on the uniform grid, ``samples[iy, ix]``."""

    grid: GridSpec
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.shape != (self.grid.n, self.grid.n):
            raise InvalidField(f"sample array has shape {s.shape}, expected {(self.grid.n,) * 2}")
        object.__setattr__(self, "samples", s)


def forward_transform(u: RealField, truncate: bool = True) -> SpectralField:
    """Normalized FFT of a real field.

    With ``truncate=True`` (the default) modes outside the Galerkin space are
    zeroed; pass ``truncate=False`` to keep every resolved mode, in which case
    the transform is exactly invertible for arbitrary grid data.
    """
    s = u.samples
    if not np.all(np.isfinite(s)):
        raise InvalidField("samples contain NaN or Inf")
    n = u.grid.n
    c = np.fft.fft2(s) / (n * n)
    if truncate:
        c = np.where(u.grid.galerkin_mask(), c, 0.0)
    return SpectralField(u.grid, hermitian_part(c))


def inverse_transform(f: SpectralField) -> RealField:
    err = f.hermitian_error()
    if err > HERMITIAN_TOL:
        raise NotRealField(f"Hermitian symmetry violated (relative error {err:.3e})")
    n = f.grid.n
    return RealField(f.grid, np.fft.ifft2(f.coeffs * (n * n)).real)


Multiplier = Union[np.ndarray, Callable[[np.ndarray, np.ndarray], np.ndarray]]


def multiplier_array(grid: GridSpec, m: Multiplier) -> np.ndarray:
    if callable(m):
        kx, ky = grid.wavenumbers()
        return np.broadcast_to(np.asarray(m(kx, ky)), (grid.n, grid.n))
    return np.asarray(m)


def apply_multiplier(f: SpectralField, m: Multiplier) -> SpectralField:
    """``coeffs_out(k) = m(k) * coeffs_in(k)``, restricted to the Galerkin space.

    ``m`` is an (n, n) array in FFT ordering or a vectorized callable
    ``m(kx, ky)`` of integer wavenumber arrays.
    """
    arr = multiplier_array(f.grid, m)
    return SpectralField(f.grid, np.where(f.grid.galerkin_mask(), arr * f.coeffs, 0.0))


@functools.lru_cache(maxsize=None)
def _frac_symbol(n: int, s: float) -> np.ndarray:
    kmag = _kmag(n)
    with np.errstate(divide="ignore"):
        out = np.where(kmag > 0, kmag**s, 1.0 if s == 0 else 0.0)
    out.setflags(write=False)
    return out


def frac_symbol(grid: GridSpec, s: float) -> np.ndarray:
    """|k|^s with the k = 0 entry set to 0 for s != 0 (and 1 for s == 0)."""
    return _frac_symbol(grid.n, float(s))


def fractional_laplacian(f: SpectralField, s: float) -> SpectralField:
    """Lambda^s = (-Delta)^(s/2)."""
    return apply_multiplier(f, frac_symbol(f.grid, s))


def partial_x(f: SpectralField) -> SpectralField:
    kx, _ = f.grid.wavenumbers()
    return apply_multiplier(f, 1j * kx)


def partial_y(f: SpectralField) -> SpectralField:
    _, ky = f.grid.wavenumbers()
    return apply_multiplier(f, 1j * ky)


def laplacian(f: SpectralField) -> SpectralField:
    kx, ky = f.grid.wavenumbers()
    return apply_multiplier(f, -(kx * kx + ky * ky).astype(float))


# -- dealiased products ---------------------------------------------------


@functools.lru_cache(maxsize=None)
def _pad_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    cut = n // 3
    m = 3 * n // 2
    m += m % 2
    src = np.r_[0 : cut + 1, n - cut : n]
    dst = np.r_[0 : cut + 1, m - cut : m]
    return src, dst


def to_padded_physical(f: SpectralField) -> np.ndarray:
    """Samples of ``f`` on the padded grid used for alias-free products."""
    n, m = f.grid.n, f.grid.padded_size
    cut = n // 3
    src, dst = _pad_indices(n)
    half = np.zeros((m, m // 2 + 1), dtype=complex)
    half[dst, : cut + 1] = f.coeffs[src, : cut + 1]
    return np.fft.irfft2(half, s=(m, m)) * (m * m)


def from_padded_physical(samples: np.ndarray, grid: GridSpec) -> SpectralField:
    """Project padded-grid samples back onto the Galerkin space."""
    n, m = grid.n, grid.padded_size
    cut = n // 3
    src, dst = _pad_indices(n)
    half = np.fft.rfft2(samples) / (m * m)
    c = np.zeros((n, n), dtype=complex)
    c[src, : cut + 1] = half[dst, : cut + 1]
    mirrored = np.conj(_reflect(c))
    c[:, n - cut :] = mirrored[:, n - cut :]
    c[:, 0] = 0.5 * (c[:, 0] + mirrored[:, 0])
    return SpectralField(grid, c)


def dealiased_product(u: SpectralField, v: SpectralField) -> SpectralField:
    """Alias-free Galerkin projection of the pointwise product ``u * v``."""
    if u.grid != v.grid:
        raise GridMismatch(f"{u.grid} vs {v.grid}")
    return from_padded_physical(to_padded_physical(u) * to_padded_physical(v), u.grid)


# -- quadratic forms ------------------------------------------------------


def inner(f: SpectralField, g: SpectralField) -> float:
    """L^2 inner product over the torus via Parseval."""
    if f.grid != g.grid:
        raise GridMismatch(f"{f.grid} vs {g.grid}")
    return AREA * float(np.real(np.vdot(g.coeffs, f.coeffs)))


def l2_norm(f: SpectralField) -> float:
    return math.sqrt(AREA * float(np.sum(np.abs(f.coeffs) ** 2)))


def grid_lp_norm(samples: np.ndarray, p: float) -> float:
    """L^p norm on the torus using the collocation grid as quadrature."""
    a = np.abs(samples)
    if math.isinf(p):
        return float(np.max(a))
    return float((AREA * np.mean(a**p)) ** (1.0 / p))


def band_modes(k_min: float, k_max: float) -> list[tuple[int, int]]:
    """Half-plane lattice points with k_min <= |k| <= k_max, in a fixed order.

    The order depends only on the band, never on the grid, so random fields
    drawn mode-by-mode are identical across resolutions.
    """
    kk = int(math.floor(k_max))
    modes = []
    for ky in range(0, kk + 1):
        for kx in range(-kk, kk + 1):
            if ky == 0 and kx <= 0:
                continue
            r = math.hypot(kx, ky)
            if k_min <= r <= k_max:
                modes.append((kx, ky))
    return modes


def random_band_field(
    grid: GridSpec,
    rng: np.random.Generator,
    k_min: float = 1,
    k_max: float | None = None,
    spectrum_exponent: float = 2.0,
    amplitude: float = 1.0,
) -> SpectralField:
    """Zero-mean field with |u_k| ~ (1 + |k|^2)^(-exponent/2) and uniform random phases.

    Scaled so that the root-mean-square value over the torus equals ``amplitude``.
    """
    if k_max is None:
        k_max = grid.dealias_cutoff
    modes = band_modes(max(k_min, 1e-12), k_max)
    if not modes:
        raise InvalidField(f"empty band [{k_min}, {k_max}]")
    if max(max(abs(kx), abs(ky)) for kx, ky in modes) > grid.dealias_cutoff:
        raise InvalidField(f"band up to |k|={k_max} not representable on n={grid.n}")
    phases = rng.uniform(0.0, TWO_PI, size=len(modes))
    n = grid.n
    c = np.zeros((n, n), dtype=complex)
    for (kx, ky), th in zip(modes, phases):
        mag = (1.0 + kx * kx + ky * ky) ** (-spectrum_exponent / 2.0)
        val = mag * complex(math.cos(th), math.sin(th))
        c[ky % n, kx % n] = val
        c[-ky % n, -kx % n] = val.conjugate()
    rms = math.sqrt(float(np.sum(np.abs(c) ** 2)))
    return SpectralField(grid, c * (amplitude / rms))
