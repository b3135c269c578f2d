import math

import numpy as np
import pytest

from emhd_lab.emhd_rhs import EmhdParams, EmhdState, energy
from emhd_lab.errors import BlowupDetected, InvalidParameters
from emhd_lab.spectral_core import AREA, GridSpec, SpectralField
from emhd_lab.time_integrator import IntegratorConfig, choose_dt, integrate, step

from conftest import band_field, cos_x, modes, random_state

P = EmhdParams(1.5, 1.5)


def test_config_validation():
    with pytest.raises(InvalidParameters):
        IntegratorConfig(dt=0, t_end=1)
    with pytest.raises(InvalidParameters):
        IntegratorConfig(dt=0.1, t_end=1, cfl_safety=1.5)
    with pytest.raises(InvalidParameters):
        step(EmhdState.zeros(GridSpec(16)), P, -1.0)


def test_single_mode_decays_exactly(g64):
    a = modes(g64, {(3, 0): 0.25 + 0.1j})
    st0 = EmhdState(a, SpectralField.zeros(g64))
    dt = 0.37
    st1 = step(st0, P, dt)
    expect = a.coeffs * math.exp(-(3.0**1.5) * dt)
    np.testing.assert_allclose(st1.a.coeffs, expect, rtol=1e-15, atol=1e-300)
    assert not np.any(st1.b.coeffs)


def test_zero_state_is_fixed(g64):
    st = step(EmhdState.zeros(g64), P, 0.1)
    assert not np.any(st.a.coeffs) and not np.any(st.b.coeffs)


def test_linear_flow_exact_for_any_dt(g64):
    p = EmhdParams(1.2, 0.9, nonlinear=False)
    st0 = random_state(g64, 2, amplitude=1.0)
    k = g64.kmag()
    for dt in (1e-3, 0.5, 3.0):
        st1 = step(st0, p, dt)
        np.testing.assert_allclose(st1.a.coeffs, st0.a.coeffs * np.exp(-(k**1.2) * dt), rtol=1e-14, atol=1e-300)
        np.testing.assert_allclose(st1.b.coeffs, st0.b.coeffs * np.exp(-(k**0.9) * dt), rtol=1e-14, atol=1e-300)


def test_nonfinite_raises_blowup(g64):
    st0 = random_state(g64, 1, amplitude=1e150)
    with pytest.raises(BlowupDetected) as info:
        step(st0, P, 1.0)
    assert info.value.time == 1.0
    assert info.value.state is st0


def test_threshold_blowup_carries_series(g64):
    st0 = random_state(g64, 1, amplitude=0.3)
    with pytest.raises(BlowupDetected) as info:
        integrate(st0, P, IntegratorConfig(dt=1e-3, t_end=0.01, blowup_threshold=1.0))
    assert info.value.reason == "threshold"
    assert len(info.value.series) >= 1


def test_choose_dt_examples(g64):
    assert choose_dt(EmhdState.zeros(g64), P, dt_max=0.02) == 0.02
    a = cos_x(g64)
    st = EmhdState(a, SpectralField.zeros(g64))
    kmax2 = 2 * 21**2
    assert choose_dt(st, P, 0.4, dt_max=1.0) == pytest.approx(0.4 / kmax2, rel=1e-12)
    st2 = EmhdState(a * 2.0, SpectralField.zeros(g64))
    assert choose_dt(st2, P, 0.4, dt_max=1.0) == pytest.approx(0.5 * choose_dt(st, P, 0.4, dt_max=1.0), rel=1e-9)
    assert choose_dt(st, P, 0.2, dt_max=1.0) < choose_dt(st, P, 0.4, dt_max=1.0)


def test_zero_duration(g64):
    st0 = random_state(g64, 3)
    st, series = integrate(st0, P, IntegratorConfig(dt=1e-3, t_end=0.0))
    assert st is st0
    assert len(series) == 1
    assert series.metadata["steps"] == 0


def test_pure_dissipation_closed_form(g64):
    p = EmhdParams(1.3, 1.3, nonlinear=False)
    st0 = random_state(g64, 4, amplitude=1.0)
    t_end = 0.5
    st, _ = integrate(st0, p, IntegratorConfig(dt=0.05, t_end=t_end))
    k = g64.kmag()
    decay = np.exp(-2 * k**1.3 * t_end)
    closed = 0.5 * AREA * np.sum(decay * (k**2 * np.abs(st0.a.coeffs) ** 2 + np.abs(st0.b.coeffs) ** 2))
    assert energy(st) == pytest.approx(closed, rel=1e-10)


def test_inviscid_energy_drift_short(g64):
    p = EmhdParams(1.5, 1.5, nu_a=0, nu_b=0)
    st0 = random_state(g64, 5, amplitude=1.0)
    st, series = integrate(st0, p, IntegratorConfig(dt=1.0, t_end=0.05, adaptive=True, dt_max=1e-2))
    e = series.column("energy")
    assert abs(e[-1] - e[0]) <= 1e-8 * e[0]


def test_no_leakage_and_hermitian(g64):
    st0 = random_state(g64, 6, amplitude=0.05, k_max=21, exponent=1.0)
    st, _ = integrate(st0, P, IntegratorConfig(dt=2e-4, t_end=2e-3, blowup_threshold=1e300))
    for f in (st.a, st.b):
        assert f.leakage() == 0.0
        assert f.hermitian_error() <= 1e-15


def test_determinism(g64):
    st0 = random_state(g64, 7)
    cfg = IntegratorConfig(dt=1e-3, t_end=0.01)
    s1, r1 = integrate(st0, P, cfg)
    s2, r2 = integrate(st0, P, cfg)
    np.testing.assert_array_equal(s1.a.coeffs, s2.a.coeffs)
    np.testing.assert_array_equal(s1.b.coeffs, s2.b.coeffs)
    assert list(r1.rows()) == list(r2.rows())


def test_stride_and_max_steps(g64):
    st0 = random_state(g64, 8)
    _, series = integrate(st0, P, IntegratorConfig(dt=1e-3, t_end=0.01, observer_stride=3))
    t = series.column("t")
    np.testing.assert_allclose(t, [0, 0.003, 0.006, 0.009, 0.01], atol=1e-15)
    assert np.all(np.diff(t) > 0)
    st, series = integrate(st0, P, IntegratorConfig(dt=1e-3, t_end=0.01, max_steps=4))
    assert series.metadata["termination"] == "max_steps"
    assert st.time == pytest.approx(0.004)


def test_observers_called(g64):
    seen = []
    integrate(random_state(g64, 9), P, IntegratorConfig(dt=1e-3, t_end=0.004), [lambda s, r: seen.append(r.time)])
    assert seen == pytest.approx([0, 0.001, 0.002, 0.003, 0.004])


def test_fourth_order_on_coarse_sequence(g64):
    st0 = random_state(g64, 7, amplitude=0.3)
    ref, _ = integrate(st0, P, IntegratorConfig(dt=0.1 / 256, t_end=0.1, observer_stride=10**6))
    errs = []
    for nsteps in (8, 16):
        st, _ = integrate(st0, P, IntegratorConfig(dt=0.1 / nsteps, t_end=0.1, observer_stride=10**6))
        errs.append(np.max(np.abs(st.a.coeffs - ref.a.coeffs)) + np.max(np.abs(st.b.coeffs - ref.b.coeffs)))
    assert math.log2(errs[0] / errs[1]) >= 3.7
