import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kdla.errors import ConfigError, DimensionError
from kdla.koopman import DictionaryNet, KoopmanModel
from kdla.metrics import (
    amplitude_recurrence,
    basin_grid,
    basin_map,
    drift_period,
    energy,
    fourier_amplitudes,
    power_spectrum,
    spectrum_report,
    tracking_error,
)
from kdla.systems import Duffing, Trajectory


def test_tracking_error_normalisation():
    true = [Trajectory(np.array([[3.0, 3.0], [4.0, 4.0]]), 0.5)]
    pred = [Trajectory(np.array([[3.0, 0.0], [4.0, 4.0]]), 0.5)]
    rep = tracking_error(true, pred)
    assert rep.normalizer == 5.0
    np.testing.assert_allclose(rep.error, [0.0, 0.6])
    np.testing.assert_allclose(rep.times, [0.0, 0.5])
    assert rep.at(0.4) == 0.6 and rep.size == 1


def test_tracking_error_zero_for_identical():
    X = np.random.default_rng(0).standard_normal((4, 3, 10))
    assert np.all(tracking_error(X, X.copy(), dt=0.1).error == 0)
    with pytest.raises(DimensionError):
        tracking_error(X, X[:, :, :5])


def test_energy():
    np.testing.assert_allclose(energy(np.array([[1.0, 0.0], [2.0, 3.0]])), [5.0, 9.0])


def test_power_spectrum_single_tone():
    N = 1000
    t = np.arange(N) * 0.1
    rep = power_spectrum(np.sin(2 * np.pi * 16 * t / (N * 0.1)) + 2.0, dt=0.1)
    assert rep.dominant_bin == 16
    np.testing.assert_allclose(rep.frequencies[16], 0.16)
    assert rep.n_samples == N


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 300), st.integers(0, 10_000))
def test_parseval(N, seed):
    x = np.random.default_rng(seed).standard_normal(N)
    rep = power_spectrum(x)
    np.testing.assert_allclose(rep.power.sum(), N * x.var(), rtol=1e-10)


def test_power_spectrum_probe_and_errors():
    S = np.vstack([np.sin(np.arange(64) * 2 * np.pi * 4 / 64), np.sin(np.arange(64) * 2 * np.pi * 9 / 64)])
    assert power_spectrum(S, probe=1).dominant_bin == 9
    with pytest.raises(DimensionError):
        power_spectrum(S, probe=2)
    with pytest.raises(ConfigError):
        power_spectrum(np.ones(3))


def test_spectrum_report_counts_outside():
    rep = spectrum_report(np.array([1.2, 1.0 + 1e-9, 0.5j]), tol=1e-6)
    assert rep.n_outside == 1
    np.testing.assert_allclose(rep.distances, [0.2, 1e-9, 0.5], atol=1e-15)
    assert rep.max_modulus == pytest.approx(1.2)
    model = KoopmanModel(np.diag([0.9, 0.3]), DictionaryNet(2), 0.1)
    assert spectrum_report(model).max_modulus == pytest.approx(0.9)


def test_basin_grid_shape():
    g = basin_grid(20)
    assert g.shape == (2, 400)
    assert g.min() == -2.0 and g.max() == 2.0


def test_basin_truth_labels_wells():
    ics = np.array([[1.0, -1.0, 0.0], [0.0, 0.0, 0.0]])
    rep = basin_map(Duffing(), ics, horizon=30)
    np.testing.assert_array_equal(rep.labels, [1.0, -1.0, 0.0])
    assert rep.agreement(rep) == 1.0


@settings(max_examples=10, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_basin_map_is_odd(a, b):
    ics = np.array([[a, -a], [b, -b]])
    rep = basin_map(Duffing(), ics)
    np.testing.assert_allclose(rep.final_x1[1], -rep.final_x1[0], atol=1e-12)
    assert rep.labels[1] == -rep.labels[0]


def test_basin_map_for_linear_model_and_flags():
    stable = KoopmanModel(0.5 * np.eye(2), DictionaryNet(2), 0.1)
    rep = basin_map(stable, basin_grid(3), mode="oo")
    assert np.all(rep.labels == 0)
    wild = KoopmanModel(1e3 * np.eye(2), DictionaryNet(2), 0.1)
    rep = basin_map(wild, basin_grid(3), mode="so", horizon=20)
    assert rep.flagged[rep.ics[0] != 0].all()
    with pytest.raises(ConfigError):
        basin_map("duffing", basin_grid(2))


def _wave(c, L=12.0, n=64, dt=0.1, steps=400, beat=None):
    x = L * np.arange(n) / n
    t = dt * np.arange(steps + 1)
    a = 1.0 if beat is None else 1.0 + 0.3 * np.cos(2 * np.pi * t / beat)
    S = np.sin(2 * np.pi * (x[:, None] - c * t) / L) + 0.5 * a * np.cos(4 * np.pi * (x[:, None] - c * t) / L)
    return Trajectory(S, dt)


def test_travelling_wave_amplitudes_constant():
    tr = _wave(0.7)
    A = fourier_amplitudes(tr)
    assert A.shape == (32, 401)
    np.testing.assert_allclose(A, np.broadcast_to(A[:, :1], A.shape), atol=1e-12)
    lag, miss = amplitude_recurrence(tr, [7, 50])
    assert miss < 1e-12
    assert amplitude_recurrence(tr, [7, 50], tol=0.1)[0] == 7


def test_drift_period_oracle():
    # one domain length L=12 at speed 0.3 takes 40 time units
    assert drift_period(_wave(0.3)) == pytest.approx(40.0, rel=1e-9)
    assert drift_period(_wave(0.0)) > 1e12


def test_recurrence_finds_beat():
    tr = _wave(0.3, beat=2.5)
    lag, miss = amplitude_recurrence(tr, range(1, 60), tol=1e-3)
    assert lag == 25 and miss < 1e-12
    assert amplitude_recurrence(tr, range(5, 24))[1] > 1e-2
    with pytest.raises(ConfigError):
        amplitude_recurrence(tr, [401])
