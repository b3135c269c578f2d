"""Inhomogeneous Littlewood-Paley calculus on the discrete torus.

The radial cutoff ``chi`` equals 1 on ``|xi| <= 3/4`` and 0 on ``|xi| >= 1``,
with the C-infinity step ``s(t) = g(t) / (g(t) + g(1 - t))``,
``g(t) = exp(-1/t)``, in between.  Shell multipliers are

    phi_{-1}(k) = chi(k),    phi_q(k) = chi(k / 2^(q+1)) - chi(k / 2^q),  q >= 0,

so that ``S_q = sum_{j <= q} Delta_j`` has symbol ``chi(k / 2^(q+1))`` exactly.
All block operations are diagonal multipliers evaluated on the integer
lattice and cached per (grid size, shell).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GridMismatch, InvalidShell, ZeroBlock
from .spectral_core import (
    AREA,
    GridSpec,
    SpectralField,
    apply_multiplier,
    frac_symbol,
    from_padded_physical,
    grid_lp_norm,
    inverse_transform,
    l2_norm,
    partial_x,
    partial_y,
    to_padded_physical,
)

PLATEAU = 0.75


def smooth_step(t):
    """0 for t <= 0, 1 for t >= 1, and s(t) + s(1 - t) = 1 in between."""
    t = np.asarray(t, dtype=float)
    tc = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        g0 = np.where(tc > 0, np.exp(-1.0 / np.where(tc > 0, tc, 1.0)), 0.0)
        g1 = np.where(tc < 1, np.exp(-1.0 / np.where(tc < 1, 1.0 - tc, 1.0)), 0.0)
        out = g0 / (g0 + g1)
    return np.where(t <= 0, 0.0, np.where(t >= 1, 1.0, out))


def chi(xi_norm):
    """Radial low-pass profile as a function of |xi|."""
    r = np.asarray(xi_norm, dtype=float)
    return 1.0 - smooth_step((r - PLATEAU) / (1.0 - PLATEAU))


@dataclass(frozen=True)
class LPParams:
    """Cutoff construction bound to a grid.

    ``q_max`` is the largest shell index needed for ``sum_{q=-1}^{q_max} phi_q``
    to equal 1 on every Galerkin mode.
    """

    grid: GridSpec

    @property
    def q_max(self) -> int:
        return math.ceil(math.log2(math.sqrt(2.0) * self.grid.dealias_cutoff)) + 1

    @property
    def shells(self) -> range:
        return range(-1, self.q_max + 1)

    def transition(self, t):
        return smooth_step(t)

    def chi(self, xi_norm):
        return chi(xi_norm)


def chi_eval(xi_norm: float, p: LPParams | None = None) -> float:
    return float(chi(xi_norm))


def _phi_radial(r, q: int):
    if q < -1:
        raise InvalidShell(f"shell index must be >= -1, got {q}")
    if q == -1:
        return chi(r)
    return chi(r / 2.0 ** (q + 1)) - chi(r / 2.0**q)


def phi_q_eval(k: tuple[int, int], q: int, p: LPParams | None = None) -> float:
    kx, ky = k
    return float(_phi_radial(math.hypot(kx, ky), q))


@functools.lru_cache(maxsize=None)
def _phi_symbol(n: int, q: int) -> np.ndarray:
    out = _phi_radial(GridSpec(n).kmag(), q)
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=None)
def _low_symbol(n: int, q: int) -> np.ndarray:
    if q <= -2:
        out = np.zeros((n, n))
    else:
        out = chi(GridSpec(n).kmag() / 2.0 ** (q + 1))
    out.setflags(write=False)
    return out


def phi_symbol(grid: GridSpec, q: int) -> np.ndarray:
    """phi_q on the lattice; zero for q <= -2 (the convention Delta_q = 0 there)."""
    if q <= -2:
        return np.zeros((grid.n, grid.n))
    return _phi_symbol(grid.n, q)


def low_symbol(grid: GridSpec, q: int) -> np.ndarray:
    return _low_symbol(grid.n, q)


def dyadic_block(u: SpectralField, q: int) -> SpectralField:
    """Delta_q u."""
    if q < -1:
        raise InvalidShell(f"shell index must be >= -1, got {q}")
    return apply_multiplier(u, phi_symbol(u.grid, q))


def low_cutoff(u: SpectralField, q: int) -> SpectralField:
    """S_q u, with S_q = 0 for q <= -2."""
    return apply_multiplier(u, low_symbol(u.grid, q))


def tilde_block(u: SpectralField, q: int) -> SpectralField:
    """Delta_{q-1} u + Delta_q u + Delta_{q+1} u."""
    sym = sum(phi_symbol(u.grid, j) for j in (q - 1, q, q + 1))
    return apply_multiplier(u, sym)


def decompose(u: SpectralField) -> list[SpectralField]:
    """Blocks Delta_q u for q = -1 .. q_max (list index q + 1)."""
    return [dyadic_block(u, q) for q in LPParams(u.grid).shells]


@functools.lru_cache(maxsize=None)
def _sobolev_weight(n: int, s: float) -> np.ndarray:
    lp = LPParams(GridSpec(n))
    w = sum(2.0 ** (2 * q * s) * _phi_symbol(n, q) ** 2 for q in lp.shells)
    w.setflags(write=False)
    return w


def sobolev_weight(grid: GridSpec, s: float) -> np.ndarray:
    """sum_q lambda_q^{2s} phi_q(k)^2 with lambda_q = 2^q."""
    return _sobolev_weight(grid.n, float(s))


def dyadic_sobolev_norm(u: SpectralField, s: float) -> float:
    """(sum_q 4^{q s} ||Delta_q u||_{L^2}^2)^{1/2}."""
    w = sobolev_weight(u.grid, s)
    return math.sqrt(AREA * float(np.sum(w * np.abs(u.coeffs) ** 2)))


def multiplier_sobolev_norm(u: SpectralField, s: float) -> float:
    """(sum_k (1 + |k|^2)^s |u_k|^2)^{1/2} times the torus area factor."""
    k2 = u.grid.kmag() ** 2
    return math.sqrt(AREA * float(np.sum((1.0 + k2) ** s * np.abs(u.coeffs) ** 2)))


def norm_equivalence_bounds(grid: GridSpec, s: float) -> tuple[float, float]:
    """Sharp constants c1, c2 with c1 <= dyadic / multiplier Sobolev norm <= c2 on this grid.

    Both norms are diagonal in k, so the extreme ratios are attained on single
    modes: min and max of sqrt(W_s(k) / (1 + |k|^2)^s) over the Galerkin space.
    """
    mask = grid.galerkin_mask()
    r = np.sqrt(sobolev_weight(grid, s)[mask] / (1.0 + grid.kmag()[mask] ** 2) ** s)
    return float(r.min()), float(r.max())


# -- paraproducts ---------------------------------------------------------


def _same_grid(u: SpectralField, v: SpectralField):
    if u.grid != v.grid:
        raise GridMismatch(f"{u.grid} vs {v.grid}")


def bony_split(u: SpectralField, v: SpectralField):
    """Low-high, high-low and high-high parts of ``u * v``.

    Returns ``(sum_l S_{l-2}u Delta_l v, sum_l Delta_l u S_{l-2}v,
    sum_l Delta_l u tilde-Delta_l v)``, each product alias-free.
    """
    _same_grid(u, v)
    grid = u.grid
    shells = LPParams(grid).shells
    m = grid.padded_size
    lh, hl, hh = (np.zeros((m, m)) for _ in range(3))
    for l in shells:
        du = to_padded_physical(dyadic_block(u, l))
        dv = to_padded_physical(dyadic_block(v, l))
        lh += to_padded_physical(low_cutoff(u, l - 2)) * dv
        hl += du * to_padded_physical(low_cutoff(v, l - 2))
        hh += du * to_padded_physical(tilde_block(v, l))
    return tuple(from_padded_physical(part, grid) for part in (lh, hl, hh))


def _grad(f: SpectralField) -> tuple[SpectralField, SpectralField]:
    return partial_x(f), partial_y(f)


def _dot_padded(us: Sequence[SpectralField], ws: Sequence[SpectralField]) -> np.ndarray:
    return sum(to_padded_physical(a) * to_padded_physical(b) for a, b in zip(us, ws))


def transport_paraproduct_terms(u: Sequence[SpectralField], v: SpectralField, q: int):
    """Split ``Delta_q(u . grad v)`` for a vector field ``u = (u1, u2)``.

    Returns ``(lh, hl, hh)`` with

        lh = sum_{|q-l|<=2} Delta_q(S_{l-2}u . grad Delta_l v)
        hl = sum_{|q-l|<=2} Delta_q(Delta_l u . grad S_{l-2}v)
        hh = sum_{l>=q-2}   Delta_q(Delta_l u . grad tilde-Delta_l v)

    whose total equals ``Delta_q(u . grad v)`` exactly.
    """
    if q < -1:
        raise InvalidShell(f"shell index must be >= -1, got {q}")
    u = tuple(u)
    if len(u) != 2:
        raise ValueError("u must be a pair of components")
    grid = v.grid
    for comp in u:
        _same_grid(comp, v)
    q_max = LPParams(grid).q_max
    m = grid.padded_size
    lh, hl, hh = (np.zeros((m, m)) for _ in range(3))
    for l in range(max(-1, q - 2), q + 3):
        lh += _dot_padded([low_cutoff(c, l - 2) for c in u], _grad(dyadic_block(v, l)))
        hl += _dot_padded([dyadic_block(c, l) for c in u], _grad(low_cutoff(v, l - 2)))
    for l in range(max(-1, q - 2), q_max + 1):
        hh += _dot_padded([dyadic_block(c, l) for c in u], _grad(tilde_block(v, l)))
    return tuple(dyadic_block(from_padded_physical(part, grid), q) for part in (lh, hl, hh))


def transport_product(u: Sequence[SpectralField], v: SpectralField) -> SpectralField:
    """Alias-free ``u . grad v``."""
    return from_padded_physical(_dot_padded(u, _grad(v)), v.grid)


# -- commutator and Bernstein ---------------------------------------------


def commutator(u: SpectralField, v: SpectralField, p: int, q: int, s_exp: float) -> SpectralField:
    """[Delta_q, S_{p-2}u Lambda^s] Delta_p v.

    Equals ``Delta_q(S_{p-2}u * Lambda^s Delta_p v) - S_{p-2}u * Delta_q Lambda^s Delta_p v``.
    The mean of ``S_{p-2}u`` commutes with ``Delta_q`` and is dropped before
    multiplying, so a constant ``u`` gives exactly zero rather than rounding noise.
    """
    _same_grid(u, v)
    if p < -1 or q < -1:
        raise InvalidShell(f"shell indices must be >= -1, got p={p}, q={q}")
    grid = u.grid
    lowc = low_cutoff(u, p - 2)
    low = to_padded_physical(lowc - SpectralField.constant(grid, lowc.mean))
    w = apply_multiplier(dyadic_block(v, p), frac_symbol(grid, s_exp))
    first = dyadic_block(from_padded_physical(low * to_padded_physical(w), grid), q)
    second = from_padded_physical(low * to_padded_physical(dyadic_block(w, q)), grid)
    return first - second


def grad_sup_norm(f: SpectralField) -> float:
    """max over the collocation grid of |grad f|."""
    gx, gy = (inverse_transform(g).samples for g in _grad(f))
    return float(np.max(np.hypot(gx, gy)))


def commutator_ratio(u: SpectralField, v: SpectralField, p: int, q: int, s_exp: float) -> float:
    """||commutator||_2 / (lambda_q^{-1} ||grad S_{p-2}u||_inf ||Delta_p Lambda^s v||_2).

    Returns NaN when the denominator vanishes.
    """
    num = l2_norm(commutator(u, v, p, q, s_exp))
    den = (
        2.0 ** (-q)
        * grad_sup_norm(low_cutoff(u, p - 2))
        * l2_norm(apply_multiplier(dyadic_block(v, p), frac_symbol(u.grid, s_exp)))
    )
    if den == 0.0:
        return math.nan
    return num / den


def _grad_tensor_norm(f: SpectralField, m: int) -> np.ndarray:
    """Pointwise Frobenius norm of the m-th derivative tensor of f."""
    if m == 0:
        return np.abs(inverse_transform(f).samples)
    kx, ky = f.grid.wavenumbers()
    total = np.zeros((f.grid.n, f.grid.n))
    # multi-indices with j derivatives in x occur binom(m, j) times
    for j in range(m + 1):
        sym = (1j * kx) ** j * (1j * ky) ** (m - j)
        d = inverse_transform(apply_multiplier(f, sym)).samples
        total += math.comb(m, j) * d * d
    return np.sqrt(total)


def bernstein_ratio(
    u: SpectralField,
    q: int,
    m: int,
    p_exp: float,
    r_exp: float,
    reverse: bool = False,
) -> float:
    """Ratio of the two sides of a Bernstein inequality for the block Delta_q u.

    Forward: ``||grad^m Delta_q u||_r / (lambda_q^{m + 2(1/p - 1/r)} ||Delta_q u||_p)``.
    Reverse (``reverse=True``, uses ``r`` only):
    ``lambda_q^m ||Delta_q u||_r / ||grad^m Delta_q u||_r``.
    Lebesgue norms use the collocation grid as quadrature.
    """
    if p_exp > r_exp:
        raise ValueError("need p <= r")
    block = dyadic_block(u, q)
    if not np.any(block.coeffs):
        raise ZeroBlock(f"Delta_{q} u vanishes")
    lam = 2.0**q
    deriv = _grad_tensor_norm(block, m)
    plain = np.abs(inverse_transform(block).samples)
    if reverse:
        return lam**m * grid_lp_norm(plain, r_exp) / grid_lp_norm(deriv, r_exp)
    inv = lambda e: 0.0 if math.isinf(e) else 1.0 / e  # noqa: E731
    scale = lam ** (m + 2.0 * (inv(p_exp) - inv(r_exp)))
    return grid_lp_norm(deriv, r_exp) / (scale * grid_lp_norm(plain, p_exp))
