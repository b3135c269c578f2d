import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emhd_lab.diagnostics import (
    DiagnosticsSeries,
    EnergyRecord,
    cancellation_check,
    centered_derivative,
    compare_to_frozen,
    dissipation_functional,
    empirical_constant_suite,
    energy_functional,
    gronwall_monitor,
    load_frozen_constants,
    select_theorem_params,
)
from emhd_lab.emhd_rhs import EmhdParams, EmhdState
from emhd_lab.errors import InsufficientSamples, InvalidParameters, NonpositiveEnergy, ThresholdViolated
from emhd_lab.littlewood_paley import bernstein_ratio, phi_symbol
from emhd_lab.spectral_core import GridSpec, SpectralField
from emhd_lab.time_integrator import IntegratorConfig, integrate

from conftest import band_field, cos_x, random_state

seeds = st.integers(0, 2**32 - 1)


def test_theorem_params_worked_example():
    tp = select_theorem_params(1.5, 1.5)
    assert tp.theta_upper == pytest.approx(1 / 3)
    assert tp.theta == pytest.approx(1 / 6, rel=1e-14)
    assert tp.epsilon == pytest.approx(0.25, rel=1e-14)
    assert tp.gamma == pytest.approx(3.0, rel=1e-14)
    assert tp.s_min == pytest.approx(1.75, rel=1e-14)
    assert tp.growth_factor == pytest.approx(2 ** (1 / 3))


def test_theorem_params_skewed_example():
    tp = select_theorem_params(1.9, 0.2)
    assert tp.theta_upper == pytest.approx(1 - 2 / 2.1)
    assert tp.theta == pytest.approx(0.0238095, rel=1e-5)
    assert tp.epsilon == pytest.approx(0.5 * (1 - tp.theta) * 2.1 - 1, rel=1e-14)
    assert tp.epsilon == pytest.approx(0.025, abs=1e-12)
    assert tp.gamma == pytest.approx(21.0, rel=1e-12)
    assert tp.s_min == pytest.approx(1.975, rel=1e-12)


def test_theorem_params_rejections_and_overrides():
    with pytest.raises(ThresholdViolated):
        select_theorem_params(1.0, 1.0)
    with pytest.raises(ThresholdViolated):
        select_theorem_params(0.5, 1.2)
    with pytest.raises(InvalidParameters):
        select_theorem_params(1.5, 1.5, theta=0.4)
    with pytest.warns(UserWarning):
        tp = select_theorem_params(1.5, 1.5, s_requested=1.0)
    assert tp.s == pytest.approx(1.75)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert select_theorem_params(1.5, 1.5, s_requested=2.0).s == 2.0
    assert select_theorem_params(1.5, 1.5, theta=0.1).gamma == pytest.approx(5.0)


@settings(max_examples=50, deadline=None)
@given(alpha=st.floats(0.01, 1.99), beta=st.floats(0.01, 1.99))
def test_theorem_params_invariants(alpha, beta):
    if alpha + beta <= 2:
        with pytest.raises(ThresholdViolated):
            select_theorem_params(alpha, beta)
        return
    tp = select_theorem_params(alpha, beta)
    assert 0 < tp.theta < tp.theta_upper
    assert tp.epsilon > 0
    assert tp.gamma == pytest.approx(1 / (2 * tp.theta))
    assert tp.s >= 2 - tp.epsilon
    assert select_theorem_params(alpha, beta) == tp


def test_energy_functional_examples(g64):
    c = 1.3
    st_b = EmhdState(SpectralField.zeros(g64), SpectralField.constant(g64, c))
    for s in (0.0, 1.0, 2.0):
        # only the q=-1 block, whose weight is lambda_{-1}^{2s} = 4^{-s}
        assert energy_functional(st_b, s) == pytest.approx(c**2 * (2 * math.pi) ** 2 * 4.0**-s, rel=1e-14)
    st_a = EmhdState(cos_x(g64), SpectralField.zeros(g64))
    assert energy_functional(st_a, 0.0) == pytest.approx(2 * math.pi**2, rel=1e-14)


def test_dissipation_functional_examples(g64):
    st_b = EmhdState(SpectralField.zeros(g64), cos_x(g64))
    for alpha in (0.5, 1.5):
        assert dissipation_functional(st_b, 0.0, alpha, 2.0) == pytest.approx(2 * math.pi**2, rel=1e-14)
    assert dissipation_functional(EmhdState.zeros(g64), 2.0, 1.5, 1.5) == 0.0


@settings(max_examples=20, deadline=None)
@given(seed=seeds, lam=st.floats(-50, 50), s=st.floats(0, 3))
def test_functionals_are_quadratic(seed, lam, s):
    g = GridSpec(32)
    st0 = random_state(g, seed % 10**6, k_max=10, amplitude=1.0, exponent=1.0)
    scaled = EmhdState(st0.a * lam, st0.b * lam)
    assert energy_functional(scaled, s) == pytest.approx(lam**2 * energy_functional(st0, s), rel=1e-12, abs=1e-300)
    d0 = dissipation_functional(st0, s, 1.2, 0.9)
    assert dissipation_functional(scaled, s, 1.2, 0.9) == pytest.approx(lam**2 * d0, rel=1e-12, abs=1e-300)


def test_dissipation_dominates_energy_on_nonzero_modes(g64):
    st0 = random_state(g64, 3, k_max=21, exponent=1.0)
    for s in (0.0, 1.0, 2.0):
        assert dissipation_functional(st0, s, 1.5, 1.5) >= energy_functional(st0, s)


def test_energy_monotone_in_s_per_block(g64):
    st0 = random_state(g64, 4, k_max=21, exponent=1.0)
    ca = np.abs(st0.a.coeffs) ** 2 * g64.kmag() ** 2 + np.abs(st0.b.coeffs) ** 2
    for q in range(0, 6):
        block = float(np.sum(phi_symbol(g64, q) ** 2 * ca))
        per_s = [4.0 ** (q * s) * block for s in (0.0, 0.5, 1.0, 2.0, 3.0)]
        assert per_s == sorted(per_s)
    # the q=-1 factor 4^{-s} decreases with s
    assert 4.0 ** (-1 * 1.0) < 4.0 ** (-1 * 0.5)


def test_linear_flow_identity(g64):
    p = EmhdParams(1.5, 1.5, nonlinear=False)
    st0 = random_state(g64, 5, amplitude=0.5)
    errs = []
    for dt in (2e-3, 1e-3):
        _, series = integrate(st0, p, IntegratorConfig(dt=dt, t_end=10 * dt, sobolev_s=2.0))
        dE = centered_derivative(series.column("t"), series.column("E_s"))
        D = series.column("D_s")[1:-1]
        errs.append(np.max(np.abs(dE + 2 * D) / (2 * D)))
    assert errs[0] < 1e-2
    assert 1.7 <= math.log2(errs[0] / errs[1]) <= 2.3  # three-point differences are O(dt^2)


def test_centered_derivative_exact_for_quadratics():
    t = np.array([0.0, 0.1, 0.25, 0.3, 0.7])
    f = 3 * t**2 - t + 2
    np.testing.assert_allclose(centered_derivative(t, f), 6 * t[1:-1] - 1, rtol=1e-12)


def _series(ts, Es, Ds=None):
    s = DiagnosticsSeries()
    Ds = Ds if Ds is not None else [0.0] * len(ts)
    for t, e, d in zip(ts, Es, Ds):
        s.append(EnergyRecord(t, e, d, 0.0, 0.0, 0.0, 0.0))
    return s


def test_gronwall_pure_dissipation(g64):
    p = EmhdParams(1.5, 1.5, nonlinear=False)
    tp = select_theorem_params(1.5, 1.5, s_requested=2.0)
    _, series = integrate(random_state(g64, 6), p, IntegratorConfig(dt=1e-3, t_end=0.05))
    fit = gronwall_monitor(series, tp)
    assert fit.C_hat == 0.0
    assert fit.T0 == math.inf
    assert fit.bound_satisfied
    assert np.all(np.diff(series.column("E_s")) <= 0)


def test_gronwall_zero_data(g64):
    tp = select_theorem_params(1.5, 1.5, s_requested=2.0)
    _, series = integrate(EmhdState.zeros(g64), EmhdParams(1.5, 1.5), IntegratorConfig(dt=1e-2, t_end=0.05))
    fit = gronwall_monitor(series, tp)
    assert fit.regularized and fit.bound_satisfied
    assert fit.C_hat == 0.0
    with pytest.raises(NonpositiveEnergy):
        gronwall_monitor(series, tp, regularize=False)


def test_gronwall_closed_form_growth():
    """E = E0 / (1 - gamma C t E0^gamma)^{1/gamma} solves dE/dt = C E^{1+gamma}."""
    tp = select_theorem_params(1.5, 1.5, s_requested=2.0)
    g, C, E0 = tp.gamma, 0.2, 1.0
    T = 1 / (2 * g * C * (1 + E0) ** g)
    t = np.linspace(0, T, 400)
    E = E0 / (1 - g * C * t * E0**g) ** (1 / g)
    fit = gronwall_monitor(_series(t, E), tp)
    assert fit.C_hat == pytest.approx(C, rel=1e-3)
    assert fit.covers_T0 or t[-1] == pytest.approx(fit.T0, rel=1e-3)
    assert fit.bound_satisfied
    assert fit.margin == pytest.approx(1.0, rel=1e-3)


def test_gronwall_flags_violation():
    # a jump after the first sample: the fitted C_hat is small relative to the
    # plateau value, so T0 covers the plateau and the bound fails there
    tp = select_theorem_params(1.5, 1.5, s_requested=2.0)
    t = np.linspace(0, 1, 11)
    fit = gronwall_monitor(_series(t, [1.0] + [10.0] * 10), tp)
    assert fit.T0 > t[1]
    assert not fit.bound_satisfied
    assert fit.max_growth == pytest.approx(10.0)


def test_gronwall_needs_samples():
    tp = select_theorem_params(1.5, 1.5)
    with pytest.raises(InsufficientSamples):
        gronwall_monitor(_series([0.0, 1.0], [1.0, 1.0]), tp)


def test_series_times_strictly_increase():
    s = _series([0.0, 1.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        s.append(EnergyRecord(1.0, 1, 1, 0, 0, 0, 0))


def test_cancellation_examples(g64):
    a = band_field(g64, 1)
    z = SpectralField.zeros(g64)
    assert cancellation_check(a, z, 2.0) == 0.0
    assert cancellation_check(z, a, 2.0) == 0.0
    assert cancellation_check(SpectralField.constant(g64, 3.0), a, 2.0) == 0.0


@settings(max_examples=5, deadline=None)
@given(seed=seeds, s=st.sampled_from([0.5, 1.0, 2.0, 3.0]))
def test_cancellation_property(seed, s):
    g = GridSpec(32)
    a, b = band_field(g, seed, k_min=0, exponent=1.0), band_field(g, seed + 1, k_min=0, exponent=1.0)
    assert cancellation_check(a, b, s) <= 1e-11


def test_single_mode_constant_cases(g64):
    c = cos_x(g64)
    assert bernstein_ratio(c, 0, 1, 2, 2) == pytest.approx(1.0, rel=1e-14)
    assert bernstein_ratio(c, 0, 0, 2, 2) == pytest.approx(1.0, rel=1e-14)


def test_suite_requires_ten_seeds(g64):
    with pytest.raises(ValueError):
        empirical_constant_suite(5, g64)


@pytest.mark.slow
def test_reference_seeds_reproduce_frozen_constants():
    frozen = load_frozen_constants()["per_grid"]
    for n, ref in frozen.items():
        rep = empirical_constant_suite(100, GridSpec(int(n)))
        for group in ("bernstein_forward", "bernstein_reverse"):
            for key, val in ref[group].items():
                assert rep[group][key] == pytest.approx(val, rel=1e-12)
        assert rep["commutator"] == pytest.approx(ref["commutator"], rel=1e-12)


def test_constants_stable_across_resolutions():
    per = load_frozen_constants()["per_grid"]
    a, b = per["64"], per["128"]
    for group in ("bernstein_forward", "bernstein_reverse"):
        for key in a[group]:
            assert b[group][key] == pytest.approx(a[group][key], rel=0.2)
    assert b["commutator"] == pytest.approx(a["commutator"], rel=0.2)


def test_compare_to_frozen_flags_excess():
    bound = load_frozen_constants()["bound"]
    rep = {
        "bernstein_forward": {k: v for k, v in bound["bernstein_forward"].items()},
        "bernstein_reverse": {k: v for k, v in bound["bernstein_reverse"].items()},
        "commutator": bound["commutator"] * 1.3,
    }
    flags = compare_to_frozen(rep)
    assert flags["commutator"] is False
    assert all(v for k, v in flags.items() if k != "commutator")
