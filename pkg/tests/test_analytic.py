import math
import warnings

import mpmath
import numpy as np
import pytest
from scipy.special import jv

from pinem_lattice.analytic import (GaussianEnvelopeSpec, ValidityWarning, band, band_angle,
                                    breathing_amplitude, breathing_argument, closed_form_propagate,
                                    displacement, gaussian_bo, pinem_limit, propagation_kernel,
                                    wannier_stark)
from pinem_lattice.errors import DomainError, WindowOverflowError
from pinem_lattice.params import LatticeModel
from pinem_lattice.tba import Schedule, SidebandState, evolve

J0_AT_2_8 = -0.185036033364387  # mpmath.besselj(0, 2.8)
J1_AT_1_4 = 0.5419477139308545  # mpmath.besselj(1, 1.4)


@pytest.fixture
def model():
    return LatticeModel.create(0.7, 1.0, 1.0, 0.4)


@pytest.mark.parametrize("order", [0, 1, -3, 7, 40, -120, 200])
@pytest.mark.parametrize("x", [0.0, 0.3, 2.8, 17.5, 63.0, 100.0])
def test_bessel_against_mpmath(order, x):
    mpmath.mp.dps = 30
    exact = float(mpmath.besselj(order, x))
    assert abs(jv(order, x) - exact) < 1e-12


def test_breathing_at_half_period():
    model = LatticeModel.create(0.7, 1.0, 1.0, 0.0)
    t = 0.5 * model.bloch_period
    assert float(breathing_argument(t, model)) == pytest.approx(2.8, rel=1e-14)
    assert abs(breathing_amplitude(0, t, model)) == pytest.approx(abs(J0_AT_2_8), abs=1e-12)


def test_breathing_revival_and_start(model):
    n = np.arange(-10, 11)
    for t in (0.0, model.bloch_period):
        amps = breathing_amplitude(n, t, model)
        assert abs(amps[10]) == pytest.approx(1.0, abs=1e-12)
        assert np.sum(np.abs(amps) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_breathing_broadcasts(model):
    t = np.linspace(0, 3, 7)
    amps = breathing_amplitude(np.arange(-4, 5)[:, None], t[None, :], model)
    assert amps.shape == (9, 7)


def test_detuned_forms_refuse_zero_detuning():
    model = LatticeModel.create(0.7, 0.0)
    with pytest.raises(DomainError):
        breathing_argument(1.0, model)
    with pytest.raises(DomainError):
        closed_form_propagate(SidebandState.delta(5), 1.0, model)


def test_pinem_limit_values():
    assert pinem_limit(1, 1.0, 0.7, 0.0) == pytest.approx(J1_AT_1_4, abs=1e-14)
    assert pinem_limit(-1, 1.0, 0.7, 0.0) == pytest.approx(-J1_AT_1_4, abs=1e-14)


def test_small_detuning_approaches_pinem_limit():
    model = LatticeModel.create(0.7, 1e-5, 1.0, 0.6)
    n = np.arange(-6, 7)
    np.testing.assert_allclose(breathing_amplitude(n, 1.5, model),
                               pinem_limit(n, 1.5, 0.7, 0.6), atol=1e-5)


def test_kernel_delta_equals_breathing(model):
    t = 2.3
    out = closed_form_propagate(SidebandState.delta(25), t, model)
    np.testing.assert_allclose(out.amplitudes, breathing_amplitude(out.indices, t, model), atol=1e-14)
    assert out.time == t


def test_kernel_matches_spectral(model):
    rng = np.random.default_rng(5)
    amps = np.zeros(129, dtype=complex)
    amps[54:75] = rng.normal(size=21) + 1j * rng.normal(size=21)
    state = SidebandState((-64, 64), amps / np.linalg.norm(amps))
    for t in (0.7, 3.1, 5.9):
        a = closed_form_propagate(state, t, model, "kernel")
        b = closed_form_propagate(state, t, model, "spectral")
        np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-12)


def test_closed_form_matches_integrator(model):
    rng = np.random.default_rng(6)
    amps = np.zeros(61, dtype=complex)
    amps[25:36] = rng.normal(size=11) + 1j * rng.normal(size=11)
    state = SidebandState((-30, 30), amps / np.linalg.norm(amps))
    trace = evolve(state, Schedule.constant(model, 4.0), model)
    exact = closed_form_propagate(state, 4.0, model)
    np.testing.assert_allclose(trace.amplitudes_final, exact.amplitudes, atol=1e-6)


def test_closed_form_window_guard(model):
    with pytest.raises(WindowOverflowError):
        closed_form_propagate(SidebandState.delta(2), 3.0, model)
    with pytest.raises(WindowOverflowError):
        closed_form_propagate(SidebandState.delta(2), 3.0, model, "spectral")
    with pytest.raises(DomainError):
        closed_form_propagate(SidebandState.delta(20), 1.0, model, "fourier")


def test_kernel_norm(model):
    K = propagation_kernel(2.0, model)
    assert np.sum(np.abs(K) ** 2) == pytest.approx(1.0, abs=1e-14)


def test_band_relations(model):
    h = 1e-5
    for k in (-2.0, 0.0, 0.9):
        p = band(k, 1.3, model)
        lo, hi = band(k - h, 1.3, model), band(k + h, 1.3, model)
        assert p.group_velocity == pytest.approx((hi.omega_tilde - lo.omega_tilde) / (2 * h), abs=1e-8)
        assert p.diffraction == pytest.approx((hi.group_velocity - lo.group_velocity) / (2 * h), abs=1e-8)


def test_band_zone_and_convention(model):
    with pytest.raises(DomainError):
        band(3.5, 0.0, model)
    with pytest.raises(DomainError):
        band_angle(0.0, 0.0, model, "sideways")
    minus = band(0.0, 0.0, model, "minus")
    plus = band(0.0, 0.0, model, "plus")
    assert minus.group_velocity == pytest.approx(plus.group_velocity)
    assert minus.omega_tilde == pytest.approx(-plus.omega_tilde)


def test_displacement_short_time():
    model = LatticeModel.create(0.7, 1.0, 1.0, 0.0)
    t = 1e-4 * model.bloch_period
    v0 = band(0.0, 0.0, model).group_velocity
    assert displacement(t, 0.0, model) / t == pytest.approx(v0, rel=1e-6)


def test_displacement_is_periodic_and_conventions_agree(model):
    assert displacement(model.bloch_period, 0.0, model) == pytest.approx(0.0, abs=1e-12)
    for t in (0.3, 2.0, 4.4):
        assert displacement(t, 0.0, model, "plus") == pytest.approx(displacement(t, 0.0, model))


def test_gaussian_bo_start():
    model = LatticeModel.create(0.7, 1.0, 1.0, 0.9)
    spec = GaussianEnvelopeSpec(10.0)
    state, mean, var = gaussian_bo(spec, 0.0, model)
    ref = SidebandState.gaussian(10.0, 1.0, state.window[1])
    np.testing.assert_allclose(np.abs(state.amplitudes), np.abs(ref.amplitudes), atol=1e-14)
    assert mean == 0.0
    assert var == 100.0
    assert state.norm == pytest.approx(1.0, abs=1e-12)


def test_gaussian_bo_half_period_peak():
    model = LatticeModel.create(0.7, 1.0, 1.0, math.pi / 2)
    _, mean, _ = gaussian_bo(GaussianEnvelopeSpec(10.0), 0.5 * model.bloch_period, model)
    assert mean == pytest.approx(-4 * 0.7, abs=1e-12)


def test_gaussian_bo_tracks_integrator():
    model = LatticeModel.create(0.7, 1.0, 1.0, 0.3)
    spec = GaussianEnvelopeSpec(10.0)
    start = spec.state(1.0, 130)
    trace = evolve(start, Schedule.constant(model, 3.0), model, samples=4)
    state, mean, _ = gaussian_bo(spec, 3.0, model, 130)
    assert trace.mean_x[-1] == pytest.approx(mean, abs=5e-3)
    assert abs(np.vdot(state.amplitudes, trace.amplitudes_final)) ** 2 > 0.999


def test_validity_warning():
    model = LatticeModel.create(0.7, 1.0)
    with pytest.warns(ValidityWarning):
        gaussian_bo(GaussianEnvelopeSpec(2.0), 1.0, model)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gaussian_bo(GaussianEnvelopeSpec(6.0), 1.0, model)


def test_wannier_stark_norm_and_reconstruction(model):
    rng = np.random.default_rng(7)
    amps = np.zeros(61, dtype=complex)
    amps[27:34] = rng.normal(size=7) + 1j * rng.normal(size=7)
    state = SidebandState((-30, 30), amps / np.linalg.norm(amps))
    ladder = wannier_stark(state, model)
    assert np.sum(np.abs(ladder.coefficients) ** 2) == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(ladder.reconstruct(0.0).amplitudes, state.amplitudes, atol=1e-10)
    exact = closed_form_propagate(state, 2.5, model)
    np.testing.assert_allclose(ladder.reconstruct(2.5).amplitudes, exact.amplitudes, atol=1e-9)
    np.testing.assert_allclose(ladder.eigenvalues, -state.indices * 1.0)


def test_wannier_stark_decoupled_limit():
    model = LatticeModel.create(1e-9, 1.0)
    state = SidebandState.delta(5, site=2)
    ladder = wannier_stark(state, model)
    assert abs(ladder.coefficients[2 + 5]) == pytest.approx(1.0, abs=1e-12)
    assert abs(ladder.eigenvector(2)[2 + 5]) == pytest.approx(1.0, abs=1e-12)


def test_wannier_stark_window_guard():
    model = LatticeModel.create(0.7, 0.1)
    with pytest.raises(WindowOverflowError):
        wannier_stark(SidebandState.delta(5), model)
