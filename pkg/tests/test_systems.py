import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kdla.errors import ConfigError, DimensionError
from kdla.systems import (
    KSE,
    Burgers,
    CylinderROM,
    Duffing,
    Rossler,
    SnapshotDataset,
    StuartLandau,
    Trajectory,
    burgers_ic,
    etdrk4_integrate,
    generate_dataset,
    integrate_ensemble,
    kse_ic,
    recipe,
    rhs_eval,
    rk4_integrate,
    sample_ics,
    simulate,
    stuart_landau_exact,
    system_from_dict,
    system_to_dict,
)


def test_rhs_values():
    np.testing.assert_allclose(rhs_eval(Duffing(), [1.0, 2.0]), [2.0, -1.0 - 0.0])
    np.testing.assert_allclose(rhs_eval(Rossler(), [1.0, 2.0, 3.0]), [-5.0, 1.2, 0.1 + 3 * (1 - 9)])
    np.testing.assert_allclose(rhs_eval(StuartLandau(), [0.5]), [0.375])
    r = rhs_eval(CylinderROM(), [1.0, 0.0, 0.0])
    np.testing.assert_allclose(r, [0.1, 1.0, 10.0])
    with pytest.raises(DimensionError):
        rhs_eval(Duffing(), [1.0])


def test_rhs_batch_is_columnwise():
    X = np.random.default_rng(0).standard_normal((3, 5))
    F = rhs_eval(Rossler(), X)
    for j in range(5):
        np.testing.assert_allclose(F[:, j], rhs_eval(Rossler(), X[:, j]))


def test_stuart_landau_matches_closed_form():
    tr = rk4_integrate(StuartLandau(), [1e-3], 0.004, 5000, store_stride=10)
    exact = stuart_landau_exact(1e-3, tr.times)
    assert tr.states.shape == (1, 501)
    assert np.abs(tr.states[0] - exact).max() < 1e-6


def test_stuart_landau_crossover():
    # R = 1/sqrt(2) exactly where b exp(-2T) = 1
    b = (1 - 1e-6) / 1e-6
    T = 0.5 * np.log(b)
    np.testing.assert_allclose(stuart_landau_exact(1e-3, T), 1 / np.sqrt(2))


def test_rk4_fourth_order():
    x0 = [1.0, 0.5]
    ref = stuart_ref = rk4_integrate(Duffing(), x0, 1e-3, 2000).states[:, -1]
    e1 = np.linalg.norm(rk4_integrate(Duffing(), x0, 0.1, 20).states[:, -1] - ref)
    e2 = np.linalg.norm(rk4_integrate(Duffing(), x0, 0.05, 40).states[:, -1] - ref)
    assert 12 < e1 / e2 < 20


def test_undamped_duffing_conserves_energy():
    spec = Duffing(lam=0.0)
    tr = rk4_integrate(spec, [0.3, 0.9], 0.01, 5000)
    x1, x2 = tr.states
    H = 0.5 * x2**2 + 0.5 * spec.beta * x1**2 + 0.25 * spec.alpha * x1**4
    assert np.ptp(H) < 1e-8


def test_ensemble_matches_single():
    X0 = np.array([[0.1, -1.0], [0.2, 1.5]])
    trajs = integrate_ensemble(Duffing(), X0, 0.1, 30, substeps=10)
    single = rk4_integrate(Duffing(), X0[:, 1], 0.01, 300, store_stride=10)
    np.testing.assert_allclose(trajs[1].states, single.states, atol=1e-13)


def test_blowup_truncates():
    spec = StuartLandau()
    with pytest.warns(UserWarning), np.errstate(over="ignore", invalid="ignore"):
        tr = rk4_integrate(spec, [-50.0], 0.5, 40)
    assert "truncated_at" in tr.meta
    assert np.all(np.isfinite(tr.states))


def test_linear_kse_is_exact_per_mode():
    spec = KSE(L=22.0, nonlinear=False)
    x = spec.grid()
    q = 2 * np.pi / 22.0
    u0 = np.cos(q * x) + 0.3 * np.sin(3 * q * x)
    tr = etdrk4_integrate(spec, u0, 0.5, 4)
    g1, g3 = q**2 - q**4, (3 * q) ** 2 - (3 * q) ** 4
    t = 2.0
    exact = np.exp(g1 * t) * np.cos(q * x) + 0.3 * np.exp(g3 * t) * np.sin(3 * q * x)
    np.testing.assert_allclose(tr.states[:, -1], exact, atol=1e-12)


def test_kse_etdrk4_converges():
    spec = KSE(L=22.0)
    u0 = kse_ic(22.0, 64, seed=3)
    ref = etdrk4_integrate(spec, u0, 1.0, 5, substeps=400).states[:, -1]
    e1 = np.linalg.norm(etdrk4_integrate(spec, u0, 1.0, 5, substeps=20).states[:, -1] - ref)
    e2 = np.linalg.norm(etdrk4_integrate(spec, u0, 1.0, 5, substeps=40).states[:, -1] - ref)
    assert e1 / e2 > 10


def test_burgers_conserves_mean_and_decays():
    # full solver grid; the 64-point subsample of a steep front aliases
    spec = Burgers(grid_points=256)
    u0 = burgers_ic(0.5, 0.4, 0.1, 0.6, spec.grid())
    tr = etdrk4_integrate(spec, u0, 0.1, 50)
    assert tr.states.shape == (256, 51)
    np.testing.assert_allclose(tr.states.mean(axis=0), tr.states[:, 0].mean(), atol=1e-10)
    assert np.abs(tr.states[:, -1]).max() < np.abs(tr.states[:, 0]).max()


def test_kse_ic_is_real_zero_mean_and_reproducible():
    a = kse_ic(22.0, 64, seed=9)
    assert abs(a.mean()) < 1e-12
    np.testing.assert_array_equal(a, kse_ic(22.0, 64, seed=9))
    c = np.fft.rfft(a)
    assert np.all(np.abs(c[9:]) < 1e-9)


def test_grid_validation():
    with pytest.raises(ConfigError):
        KSE(grid_points=60)
    with pytest.raises(ConfigError):
        Burgers(nu=0.0)


@pytest.mark.parametrize("spec", [Duffing(), Rossler(a=0.2), CylinderROM(), StuartLandau(), Burgers(), KSE(L=12.0)])
def test_system_dict_roundtrip(spec):
    assert system_from_dict(system_to_dict(spec)) == spec


def test_dataset_from_trajectories_pairs():
    tr = Trajectory(np.arange(10.0).reshape(2, 5), 0.1)
    ds = SnapshotDataset.from_trajectories([tr, tr])
    assert ds.M == 8
    np.testing.assert_array_equal(ds.X_tdt[:, :4], tr.states[:, 1:])
    with pytest.raises(ConfigError):
        SnapshotDataset.from_trajectories([tr, Trajectory(tr.states, 0.2)])


def test_duffing_recipe_dataset():
    rec = recipe("duffing")
    ds = generate_dataset(rec)
    assert ds.M == rec.expected_pairs() == 10_000
    assert ds.provenance["recipe"] == "duffing"
    np.testing.assert_array_equal(sample_ics(rec), sample_ics(recipe("duffing")))
    # IC i does not depend on how many are drawn
    np.testing.assert_array_equal(sample_ics(rec, 3), sample_ics(rec, 10)[:, :3])


def test_stuart_landau_recipe():
    rec = recipe("stuart-landau")
    tr = simulate(rec, sample_ics(rec))[0]
    assert tr.states.shape == (1, 501)
    assert np.abs(tr.states[0] - stuart_landau_exact(1e-3, tr.times)).max() < 1e-6


def test_unknown_recipe():
    with pytest.raises(ConfigError):
        recipe("lorenz")


@settings(max_examples=20, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_duffing_odd_symmetry(a, b):
    # f(-x) = -f(x), so trajectories from -x0 are negated trajectories from x0
    p = rk4_integrate(Duffing(), [a, b], 0.05, 40).states
    m = rk4_integrate(Duffing(), [-a, -b], 0.05, 40).states
    np.testing.assert_allclose(m, -p, atol=1e-12)
