import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kdla.errors import ConfigError, DimensionError
from kdla.koopman import (
    DictionaryNet,
    KoopmanModel,
    ObservablePair,
    TrainConfig,
    edmd_fit,
    evolve_observable_only,
    evolve_state_observable,
    kdla_loss,
    kdla_loss_grad,
    lift,
    make_dictionary,
    readback,
    spectrum,
    train_kdl_alternating,
    train_kdla,
)
from kdla.linalg import eigvals
from kdla.systems import SnapshotDataset

from conftest import central_diff, rel_err


def linear_data(D, M, seed=0):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((D, D)))
    L = Q @ np.diag(rng.uniform(0.5, 0.99, D)) @ Q.T
    X = rng.standard_normal((D, M))
    return L, X, L @ X


def test_lift_layout_and_readback():
    dic = make_dictionary(3, [5], 4, "elu", include_constant=True, seed=1)
    X = np.random.default_rng(0).standard_normal((3, 6))
    psi = lift(dic, X)
    assert psi.shape == (dic.D, 6) == (8, 6)
    np.testing.assert_array_equal(psi[:3], X)
    np.testing.assert_array_equal(psi[3], 1.0)
    np.testing.assert_array_equal(readback(psi, dic), X)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 6), st.booleans(), st.integers(0, 999))
def test_readback_lift_identity(n, d, const, seed):
    dic = make_dictionary(n, [4], d, "tanh", include_constant=const, seed=seed)
    X = np.random.default_rng(seed).standard_normal((n, 3))
    np.testing.assert_array_equal(readback(lift(dic, X), dic), X)


def test_lift_shape_errors():
    dic = make_dictionary(2, [3], 2)
    with pytest.raises(DimensionError):
        lift(dic, np.ones((3, 4)))
    with pytest.raises(DimensionError):
        readback(np.ones((3, 4)), dic)


def test_edmd_recovers_linear_map():
    D = 6
    L, X, Y = linear_data(D, 5 * D)
    K = edmd_fit(ObservablePair(X, Y))
    assert np.linalg.norm(K - L) < 1e-8


def test_edmd_tikhonov_forms():
    L, X, Y = linear_data(4, 40, seed=2)
    K_mean = edmd_fit(ObservablePair(X, Y), tikhonov=0.1)
    K_sum = edmd_fit(ObservablePair(X, Y), tikhonov=0.1, gram="sum")
    G = X @ X.T / 40
    ref = np.linalg.solve(G + 0.1 * np.eye(4), X @ Y.T / 40).T
    np.testing.assert_allclose(K_mean, ref, atol=1e-12)
    # the unnormalised Gram is regularised 40x more weakly
    assert np.linalg.norm(K_sum - L) < np.linalg.norm(K_mean - L)
    with pytest.raises(ConfigError):
        edmd_fit(ObservablePair(X, Y), tikhonov=-1)


def test_kdla_loss_zero_on_linear_data():
    L, X, Y = linear_data(5, 30)
    assert kdla_loss(ObservablePair(X, Y)) < 1e-10


def test_kdla_loss_requires_more_snapshots_than_observables():
    X = np.ones((5, 5))
    with pytest.raises(ConfigError):
        kdla_loss(ObservablePair(X, X))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_kdla_loss_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((4, 15))
    Y = rng.standard_normal((4, 15))
    perm = rng.permutation(15)
    a = kdla_loss(ObservablePair(X, Y))
    b = kdla_loss(ObservablePair(X[:, perm], Y[:, perm]))
    assert abs(a - b) <= 1e-12 * max(1.0, a)


def test_kdla_loss_matches_projector_form():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((3, 10))
    Y = rng.standard_normal((3, 10))
    P = np.eye(10) - np.linalg.pinv(X) @ X
    assert abs(kdla_loss(ObservablePair(X, Y)) - np.linalg.norm(Y @ P)) < 1e-12


def _loss_of_params(dic, X, Y, **kw):
    def f(i):
        def g(v):
            arrs = dic.net.arrays()
            arrs[i] = v
            return kdla_loss_grad(dic.with_net(dic.net.with_arrays(arrs)), X, Y, rcond=0.0, **kw)[0]
        return g
    return f


@pytest.mark.parametrize("two_set", [False, True])
def test_kdla_gradient_matches_finite_differences(two_set):
    rng = np.random.default_rng(11)
    dic = make_dictionary(2, [6], 6, "tanh", seed=3)  # D = 8
    X = rng.standard_normal((2, 40))
    Y = X + 0.1 * np.sin(X)
    kw = {}
    if two_set:
        kw = dict(X_k=rng.standard_normal((2, 40)), X_k_tdt=None)
        kw["X_k_tdt"] = kw["X_k"] + 0.1 * np.sin(kw["X_k"])
    loss, grads, K = kdla_loss_grad(dic, X, Y, rcond=0.0, **kw)
    assert K.shape == (8, 8)
    f = _loss_of_params(dic, X, Y, **kw)
    for i, (a, g) in enumerate(zip(dic.net.arrays(), grads.arrays())):
        assert rel_err(g, central_diff(f(i), a, h=1e-6)) < 1e-4


def test_kdla_gradient_without_network():
    dic = DictionaryNet(2)
    X = np.random.default_rng(0).standard_normal((2, 10))
    loss, grads, K = kdla_loss_grad(dic, X, 0.9 * X)
    assert grads is None and loss < 1e-12
    np.testing.assert_allclose(K, 0.9 * np.eye(2), atol=1e-12)


def test_train_without_network_recovers_spectrum():
    L, X, Y = linear_data(6, 30, seed=5)
    model = train_kdla(SnapshotDataset(X, Y, 0.1), TrainConfig(d=0, hidden=(), epochs=1))
    ours = eigvals(model.K)
    ref = np.sort_complex(np.linalg.eigvals(L))
    np.testing.assert_allclose(np.sort_complex(ours), ref, atol=1e-8)


def _linear_system_dataset():
    rng = np.random.default_rng(0)
    A = np.array([[0.95, 0.1], [-0.1, 0.95]])
    X = rng.uniform(-1, 1, (2, 200))
    return SnapshotDataset(X, A @ X + 0.05 * X**2, 0.1)


def test_train_kdla_reduces_loss_and_is_deterministic():
    ds = _linear_system_dataset()
    cfg = TrainConfig(hidden=(10,), d=4, epochs=30, lr=1e-2, lr_late=1e-3, seed=1)
    a = train_kdla(ds, cfg)
    b = train_kdla(ds, cfg)
    curve = a.meta["loss_curve"]
    assert min(curve) < curve[0]
    np.testing.assert_array_equal(a.K, b.K)
    assert a.meta["selection"] == "loss"
    assert a.K.shape == (6, 6)


def test_train_kdla_minibatch_and_validation():
    ds = _linear_system_dataset()
    from kdla.systems import Trajectory

    x = np.empty((2, 21))
    x[:, 0] = [0.5, -0.2]
    A = np.array([[0.95, 0.1], [-0.1, 0.95]])
    for i in range(20):
        x[:, i + 1] = A @ x[:, i] + 0.05 * x[:, i] ** 2
    cfg = TrainConfig(hidden=(8,), d=3, epochs=20, batch_size=50, seed=0, select_every=5)
    m = train_kdla(ds, cfg, validation=Trajectory(x, 0.1))
    assert m.meta["selection"] == "rollout"
    assert len(m.meta["selection_scores"]) >= 4


def test_train_alternating_runs():
    ds = _linear_system_dataset()
    cfg = TrainConfig(hidden=(8,), d=3, epochs=10, tikhonov=1e-3, seed=0)
    m = train_kdl_alternating(ds, cfg)
    assert m.meta["method"] == "kdl-alternating"
    assert np.all(np.isfinite(m.K))


def test_rollout_modes_agree_when_m_large():
    dic = make_dictionary(2, [5], 3, seed=2)
    K = np.random.default_rng(0).standard_normal((5, 5)) * 0.3
    model = KoopmanModel(K, dic, 0.1)
    x0 = np.array([0.3, -0.4])
    oo = evolve_observable_only(model, x0, 12)
    so = evolve_state_observable(model, x0, 12, m=12)
    np.testing.assert_allclose(so.states, oo.states)
    assert oo.states.shape == (2, 13)
    # m=1 differs because the state is re-lifted every step
    so1 = evolve_state_observable(model, x0, 12, m=1)
    np.testing.assert_allclose(so1.states[:, :2], oo.states[:, :2])
    with pytest.raises(ConfigError):
        evolve_state_observable(model, x0, 3, m=0)


def test_identity_dictionary_rollout_is_linear_map():
    A = np.array([[0.9, 0.2], [0.0, 0.8]])
    model = KoopmanModel(A, DictionaryNet(2), 0.1)
    tr = evolve_observable_only(model, np.array([1.0, 1.0]), 3)
    np.testing.assert_allclose(tr.states[:, 3], np.linalg.matrix_power(A, 3) @ [1, 1])


def test_model_roundtrip(tmp_path):
    dic = make_dictionary(2, [4], 3, ["tanh", "linear"], include_constant=True, seed=0)
    model = KoopmanModel(np.eye(dic.D) * 0.5, dic, 0.25, {"k": 1})
    model.save(tmp_path / "m.json")
    back = KoopmanModel.load(tmp_path / "m.json")
    np.testing.assert_array_equal(back.K, model.K)
    np.testing.assert_array_equal(lift(back.dictionary, np.ones((2, 1))), lift(dic, np.ones((2, 1))))
    assert back.dt == 0.25 and back.meta == {"k": 1}
    with pytest.raises(DimensionError):
        KoopmanModel(np.eye(3), dic, 0.1)


def test_spectrum_sorted():
    K = np.diag([0.2, -0.9, 0.5])
    s = spectrum(K, vectors=True)
    np.testing.assert_allclose(s.moduli, [0.9, 0.5, 0.2])
    for j, lam in enumerate(s.eigenvalues):
        np.testing.assert_allclose(K @ s.eigenvectors[:, j], lam * s.eigenvectors[:, j], atol=1e-10)
