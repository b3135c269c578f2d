import numpy as np
import pytest

from emhd_lab.emhd_rhs import EmhdState
from emhd_lab.spectral_core import GridSpec, SpectralField, random_band_field


def rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def band_field(grid, seed, k_max=None, k_min=1, exponent=2.0, amplitude=1.0):
    return random_band_field(grid, rng(seed), k_min=k_min, k_max=k_max, spectrum_exponent=exponent, amplitude=amplitude)


def random_state(grid, seed, k_max=8, amplitude=0.3, exponent=4.0):
    return EmhdState(
        band_field(grid, 2 * seed, k_max, exponent=exponent, amplitude=amplitude),
        band_field(grid, 2 * seed + 1, k_max, exponent=exponent, amplitude=amplitude),
    )


def fn(grid, f):
    return SpectralField.from_function(grid, f)


@pytest.fixture(scope="session")
def g64():
    return GridSpec(64)


@pytest.fixture(scope="session")
def g16():
    return GridSpec(16)


def modes(grid, table):
    """Real field from {(kx, ky): coefficient}; conjugate partners are filled in."""
    n = grid.n
    c = np.zeros((n, n), dtype=complex)
    for (kx, ky), val in table.items():
        c[ky % n, kx % n] = val
        c[-ky % n, -kx % n] = np.conj(val)
    return SpectralField(grid, c)


def cos_x(grid):
    return modes(grid, {(1, 0): 0.5})


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
