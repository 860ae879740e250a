"""Finite Koopman approximations with a trainable dictionary.

The lifted vector is ``Psi(x) = [x; 1 (optional); net(x)]``: the raw state always
comes first, so mapping back to the state is a projection onto the first ``n``
rows.

Two training schemes are provided:

* :func:`train_kdla` differentiates the one-step EDMD residual, with ``K`` given
  in closed form by the pseudoinverse, directly with respect to the network
  weights.
* :func:`train_kdl_alternating` alternates a (Tikhonov-regularised) EDMD fit of
  ``K`` with gradient steps on the network at fixed ``K``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np

from .autodiff import (
    AdamState,
    MlpParams,
    adam_step,
    init_mlp,
    make_rng,
    mlp_backward,
    mlp_forward,
    mlp_from_dict,
    mlp_to_dict,
    step_lr,
)
from .errors import ConfigError, DimensionError, NumericalError, TrainingError
from .linalg import eigvals, eigvecs, pinv, pinv_vjp
from .systems import SnapshotDataset, Trajectory

logger = logging.getLogger(__name__)

MODEL_VERSION = "kdla-model/1"


@dataclass
class DictionaryNet:
    """State-inclusive dictionary of observables.

    ``net`` maps ``R^n -> R^d``; ``net=None`` means an empty trainable part
    (``d = 0``), in which case lifting is the identity plus the optional constant.
    """

    state_dim: int
    net: Optional[MlpParams] = None
    include_constant: bool = False

    def __post_init__(self):
        if self.net is not None and self.net.n_in != self.state_dim:
            raise DimensionError(
                f"dictionary network takes {self.net.n_in} inputs, state has {self.state_dim}"
            )

    @property
    def n(self) -> int:
        return self.state_dim

    @property
    def trainable_dim(self) -> int:
        return 0 if self.net is None else self.net.n_out

    @property
    def D(self) -> int:
        return self.state_dim + int(self.include_constant) + self.trainable_dim

    @property
    def net_offset(self) -> int:
        """Row where the trainable observables start."""
        return self.state_dim + int(self.include_constant)

    def with_net(self, net) -> "DictionaryNet":
        return replace(self, net=net)


def make_dictionary(n, hidden, d, activations="elu", include_constant=False, seed=0):
    """Build a dictionary with layer sizes ``[n, *hidden, d]``.

    ``activations`` is one tag for every layer or a list with one tag per layer.
    """
    if d == 0:
        return DictionaryNet(n, None, include_constant)
    sizes = [n, *hidden, d]
    return DictionaryNet(n, init_mlp(sizes, activations, make_rng(seed, 1)), include_constant)


def _check_states(dic, X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != dic.n:
        raise DimensionError(f"states have {X.shape[0]} rows, dictionary expects {dic.n}")
    return X


def lift(dic: DictionaryNet, X) -> np.ndarray:
    """Evaluate the observables column-wise: ``(n, M) -> (D, M)``."""
    return _lift(dic, X)[0]


def _lift(dic, X):
    X = _check_states(dic, X)
    parts = [X]
    if dic.include_constant:
        parts.append(np.ones((1, X.shape[1])))
    cache = None
    if dic.net is not None:
        Y, cache = mlp_forward(dic.net, X)
        parts.append(Y)
    return np.vstack(parts), cache


def readback(psi, dic: DictionaryNet) -> np.ndarray:
    """Map lifted vectors back to states by taking the leading state block."""
    psi = np.asarray(psi, dtype=float)
    if psi.shape[0] != dic.D:
        raise DimensionError(f"lifted vectors have {psi.shape[0]} rows, dictionary has D={dic.D}")
    return psi[: dic.n].copy()


@dataclass
class ObservablePair:
    psi_t: np.ndarray
    psi_tdt: np.ndarray
    dt: float = 1.0

    def __post_init__(self):
        self.psi_t = np.atleast_2d(np.asarray(self.psi_t, dtype=float))
        self.psi_tdt = np.atleast_2d(np.asarray(self.psi_tdt, dtype=float))
        if self.psi_t.shape != self.psi_tdt.shape:
            raise DimensionError(
                f"psi(t) {self.psi_t.shape} and psi(t+dt) {self.psi_tdt.shape} differ in shape"
            )

    @property
    def D(self) -> int:
        return self.psi_t.shape[0]

    @property
    def M(self) -> int:
        return self.psi_t.shape[1]


def edmd_fit(pair: ObservablePair, tikhonov=0.0, rcond=1e-12, method="lapack", gram="mean") -> np.ndarray:
    """Least-squares one-step matrix ``K`` with ``K psi(t) ~ psi(t+dt)``.

    With ``tikhonov == 0`` this is ``psi(t+dt) @ pinv(psi(t))``. Otherwise the Gram
    matrix ``G = psi(t) psi(t)^T / M`` is replaced by ``G + tikhonov * I`` and
    inverted directly. ``gram="sum"`` drops the ``1/M`` from both Gram matrices,
    which weakens the same ``tikhonov`` value by a factor ``M``.
    """
    X, Y = pair.psi_t, pair.psi_tdt
    if X.shape[1] < 1:
        raise ConfigError("EDMD needs at least one snapshot pair")
    if tikhonov < 0:
        raise ConfigError("Tikhonov parameter must be non-negative")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise NumericalError("non-finite observables passed to edmd_fit")
    if tikhonov == 0:
        return Y @ pinv(X, rcond=rcond, method=method)
    if gram not in ("mean", "sum"):
        raise ConfigError(f"gram must be 'mean' or 'sum', got {gram!r}")
    M = X.shape[1] if gram == "mean" else 1
    G = X @ X.T / M
    A = X @ Y.T / M
    return np.linalg.solve(G + tikhonov * np.eye(G.shape[0]), A).T


# --------------------------------------------------------------------------
# KDLA objective


def _residual_loss_grads(Xk, Yk, Xn, Yn, rcond=1e-12, method="lapack"):
    """Loss ``||Yn - Yk pinv(Xk) Xn||_F`` and its gradients w.r.t. all four inputs."""
    Xk_pinv = pinv(Xk, rcond=rcond, method=method)
    K = Yk @ Xk_pinv
    R = Yn - K @ Xn
    loss = float(np.linalg.norm(R))
    if loss == 0.0:
        z = np.zeros_like
        return loss, z(Xk), z(Yk), z(Xn), z(Yn), K
    G = R / loss
    dYn = G
    dXn = -K.T @ G
    Kbar = -G @ Xn.T
    dYk = Kbar @ Xk_pinv.T
    dXk = pinv_vjp(Xk, Xk_pinv, Yk.T @ Kbar)
    return loss, dXk, dYk, dXn, dYn, K


def _check_projector(D, M):
    if M <= D:
        raise ConfigError(
            f"KDLA loss needs more snapshots than observables (M={M}, D={D}); "
            "otherwise the projection is the identity and the loss is identically zero"
        )


def kdla_loss(pair: ObservablePair, rcond=1e-12, method="lapack") -> float:
    """``|| psi(t+dt) (I - pinv(psi(t)) psi(t)) ||_F``, the one-step residual after the best linear fit."""
    _check_projector(pair.D, pair.M)
    X, Y = pair.psi_t, pair.psi_tdt
    K = Y @ pinv(X, rcond=rcond, method=method)
    return float(np.linalg.norm(Y - K @ X))


def kdla_loss_grad(dic: DictionaryNet, X_t, X_tdt, rcond=1e-12, method="lapack", X_k=None,
                   X_k_tdt=None):
    """KDLA loss and its gradient with respect to the dictionary network.

    With ``X_k``/``X_k_tdt`` given, ``K`` is built from those snapshots while the
    residual is evaluated on ``X_t``/``X_tdt`` (the two-set minibatch form);
    gradients flow through both sets.

    Returns
    -------
    loss : float
    grads : MlpParams or None
        ``None`` when the dictionary has no trainable part.
    K : (D, D) ndarray
        The matrix used in the residual.
    """
    two_set = X_k is not None
    X_t = _check_states(dic, X_t)
    X_tdt = _check_states(dic, X_tdt)
    M = X_t.shape[1]
    cols = [X_t, X_tdt]
    if two_set:
        X_k = _check_states(dic, X_k)
        X_k_tdt = _check_states(dic, X_k_tdt)
        cols += [X_k, X_k_tdt]
        _check_projector(dic.D, X_k.shape[1])
    else:
        _check_projector(dic.D, M)
    psi, cache = _lift(dic, np.hstack(cols))
    sizes = np.cumsum([0] + [c.shape[1] for c in cols])
    blocks = [psi[:, sizes[i] : sizes[i + 1]] for i in range(len(cols))]
    if two_set:
        Xn, Yn, Xk, Yk = blocks
        loss, dXk, dYk, dXn, dYn, K = _residual_loss_grads(Xk, Yk, Xn, Yn, rcond, method)
        upstream = np.hstack([dXn, dYn, dXk, dYk])
    else:
        Xn, Yn = blocks
        loss, dXk, dYk, dXn, dYn, K = _residual_loss_grads(Xn, Yn, Xn, Yn, rcond, method)
        upstream = np.hstack([dXn + dXk, dYn + dYk])
    if dic.net is None:
        return loss, None, K
    grads, _ = mlp_backward(dic.net, cache, upstream[dic.net_offset :])
    return loss, grads, K


# --------------------------------------------------------------------------
# models


@dataclass
class KoopmanModel:
    K: np.ndarray
    dictionary: DictionaryNet
    dt: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.K = np.asarray(self.K, dtype=float)
        D = self.dictionary.D
        if self.K.shape != (D, D):
            raise DimensionError(f"K has shape {self.K.shape}, dictionary has D={D}")

    @property
    def n(self) -> int:
        return self.dictionary.n

    @property
    def D(self) -> int:
        return self.dictionary.D

    def to_dict(self) -> dict:
        dic = self.dictionary
        return {
            "version": MODEL_VERSION,
            "n": dic.n,
            "d": dic.trainable_dim,
            "include_constant": dic.include_constant,
            "dt": self.dt,
            "net": None if dic.net is None else mlp_to_dict(dic.net),
            "K": self.K.ravel().tolist(),
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KoopmanModel":
        if d.get("version") != MODEL_VERSION:
            raise ConfigError(f"not a Koopman model file (version {d.get('version')!r})")
        net = None if d["net"] is None else mlp_from_dict(d["net"])
        dic = DictionaryNet(int(d["n"]), net, bool(d["include_constant"]))
        if dic.trainable_dim != int(d["d"]):
            raise ConfigError("model file: d does not match the network output width")
        K = np.asarray(d["K"], dtype=float).reshape(dic.D, dic.D)
        return cls(K, dic, float(d["dt"]), dict(d.get("meta", {})))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path) -> "KoopmanModel":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class TrainConfig:
    """Training schedule and dictionary architecture.

    ``hidden`` and ``d`` give the network shape ``[n, *hidden, d]``. The learning
    rate drops from ``lr`` to ``lr_late`` halfway through ``epochs``.
    ``batch_size=None`` trains full-batch. For the alternating scheme,
    ``inner_epochs`` passes over the data are made at fixed ``K`` per outer epoch.

    ``rcond`` is the relative singular-value cutoff of the pseudoinverse inside
    the loss. It must sit above the float64 noise floor of the lifted data, or the
    gradient is dominated by directions that carry no signal. ``fit_rcond`` is
    the cutoff used for the final least-squares fit of ``K``.
    """

    hidden: Sequence[int] = (100, 100, 100)
    d: int = 100
    activations: object = "elu"
    include_constant: bool = False
    epochs: int = 1000
    lr: float = 1e-3
    lr_late: float = 1e-4
    seed: int = 0
    batch_size: Optional[int] = None
    k_batch_size: Optional[int] = None
    rcond: float = 1e-4
    fit_rcond: float = 1e-12
    svd_method: str = "lapack"
    select_every: int = 10
    early_stop: bool = False
    patience: int = 50
    min_rel_improvement: float = 1e-6
    tikhonov: float = 0.1
    tikhonov_gram: str = "mean"
    inner_epochs: int = 1

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["hidden"] = list(self.hidden)
        if not isinstance(self.activations, str):
            d["activations"] = list(self.activations)
        return d


def _stalled(curve, patience, tol):
    if len(curve) <= patience:
        return False
    old = min(curve[:-patience])
    new = min(curve[-patience:])
    return (old - new) <= tol * abs(old)


def train_kdla(dataset: SnapshotDataset, config: TrainConfig, dictionary=None,
               validation=None) -> KoopmanModel:
    """Learn the dictionary by gradient descent on the KDLA residual.

    By default the dictionary from the epoch with the lowest loss is kept. When
    ``validation`` (a :class:`Trajectory` or a list of them) is given, every
    ``config.select_every`` epochs the current dictionary is scored by the max
    error of an observable-only rollout along those trajectories, and the best
    scoring one is kept instead. ``K`` is refit once on the full lifted dataset.
    """
    cfg = config
    if dictionary is None:
        dictionary = make_dictionary(dataset.n, cfg.hidden, cfg.d, cfg.activations,
                                     cfg.include_constant, cfg.seed)
    dic = dictionary
    _check_projector(dic.D, dataset.M if cfg.k_batch_size is None else min(cfg.k_batch_size, dataset.M))
    rng = make_rng(cfg.seed, 2)
    curve: List[float] = []
    best = (np.inf, dic.net)
    net = dic.net
    if isinstance(validation, Trajectory):
        validation = [validation]
    scores: List[list] = []
    best_score = (np.inf, dic.net)
    state = AdamState.zeros(net.arrays()) if net is not None else None
    epochs_run = 0
    stopped_early = False
    full_batch = cfg.batch_size is None or cfg.batch_size >= dataset.M
    kb = dataset.M if cfg.k_batch_size is None else min(cfg.k_batch_size, dataset.M)
    for epoch in range(cfg.epochs):
        lr = step_lr(epoch, cfg.epochs, cfg.lr, cfg.lr_late)
        if full_batch:
            loss, grads, _ = kdla_loss_grad(dic.with_net(net), dataset.X_t, dataset.X_tdt,
                                            cfg.rcond, cfg.svd_method)
            _check_loss(loss, epoch, best)
            curve.append(loss)
            if loss < best[0]:
                best = (loss, net)
            if net is not None:
                net = _checked_step(net, grads, state, lr, loss, epoch, best)
        else:
            losses = []
            perm = rng.permutation(dataset.M)
            for start in range(0, dataset.M, cfg.batch_size):
                idx = perm[start : start + cfg.batch_size]
                kidx = np.sort(rng.choice(dataset.M, kb, replace=False)) if kb < dataset.M else slice(None)
                loss, grads, _ = kdla_loss_grad(
                    dic.with_net(net), dataset.X_t[:, idx], dataset.X_tdt[:, idx], cfg.rcond,
                    cfg.svd_method, X_k=dataset.X_t[:, kidx], X_k_tdt=dataset.X_tdt[:, kidx],
                )
                _check_loss(loss, epoch, best)
                losses.append(loss)
                if net is not None:
                    net = _checked_step(net, grads, state, lr, loss, epoch, best)
            loss = float(np.mean(losses))
            curve.append(loss)
            if loss < best[0]:
                best = (loss, net)
        epochs_run = epoch + 1
        if validation and net is not None and epoch % max(1, cfg.select_every) == 0:
            score = _rollout_score(dic.with_net(net), dataset, validation, cfg)
            scores.append([epoch, score])
            if score < best_score[0]:
                best_score = (score, net)
        if net is None:
            break
        if cfg.early_stop and _stalled(curve, cfg.patience, cfg.min_rel_improvement):
            stopped_early = True
            break
    if validation and net is not None:
        score = _rollout_score(dic.with_net(net), dataset, validation, cfg)
        scores.append([epochs_run, score])
        if score < best_score[0]:
            best_score = (score, net)
    keep = best_score[1] if validation else best[1]
    dic = dic.with_net(keep)
    K = _refit(dic, dataset, cfg)
    meta = {
        "method": "kdla",
        "epochs": epochs_run,
        "stopped_early": stopped_early,
        "best_loss": float(best[0]),
        "loss_curve": curve,
        "rcond": cfg.rcond,
        "fit_rcond": cfg.fit_rcond,
        "seed": cfg.seed,
        "k_refit": "full-dataset",
        "selection": "rollout" if validation else "loss",
        "selection_scores": scores,
        "config": cfg.as_dict(),
    }
    return KoopmanModel(K, dic, dataset.dt, meta)


def _refit(dic, dataset, cfg):
    pair = ObservablePair(lift(dic, dataset.X_t), lift(dic, dataset.X_tdt), dataset.dt)
    return edmd_fit(pair, 0.0, cfg.fit_rcond, cfg.svd_method)


def _rollout_score(dic, dataset, validation, cfg) -> float:
    model = KoopmanModel(_refit(dic, dataset, cfg), dic, dataset.dt)
    worst = 0.0
    for traj in validation:
        Nt = traj.states.shape[1] - 1
        with np.errstate(all="ignore"):
            pred = rollout_observable_only(model, traj.states[:, :1], Nt)[:, :, 0].T
        err = np.abs(pred - traj.states)
        if not np.all(np.isfinite(err)):
            return np.inf
        worst = max(worst, float(err.max()))
    return worst


def _check_loss(loss, epoch, best):
    if not np.isfinite(loss):
        raise TrainingError(f"loss became {loss} at epoch {epoch}", checkpoint=best[1], epoch=epoch)


def _checked_step(net, grads, state, lr, loss, epoch, best):
    try:
        net, _ = adam_step(net, grads, state, lr)
    except TrainingError as exc:
        raise TrainingError(f"{exc} (epoch {epoch}, loss {loss:.6g})", checkpoint=best[1],
                            epoch=epoch) from exc
    return net


def _fixed_k_loss_grad(dic, K, X_t, X_tdt):
    """Mean squared one-step residual at fixed ``K`` and its network gradient."""
    M = X_t.shape[1]
    psi, cache = _lift(dic, np.hstack([X_t, X_tdt]))
    Xp, Yp = psi[:, :M], psi[:, M:]
    R = Yp - K @ Xp
    loss = float(np.sum(R * R) / M)
    dY = 2.0 * R / M
    dX = -K.T @ dY
    if dic.net is None:
        return loss, None
    grads, _ = mlp_backward(dic.net, cache, np.hstack([dX, dY])[dic.net_offset :])
    return loss, grads


def train_kdl_alternating(dataset: SnapshotDataset, config: TrainConfig, dictionary=None) -> KoopmanModel:
    """Alternate a Tikhonov-regularised EDMD fit of ``K`` with network updates at fixed ``K``.

    Each outer epoch refits ``K`` on the full lifted dataset and then makes
    ``config.inner_epochs`` minibatch passes with Adam. The final ``K`` is refit on
    the final dictionary.
    """
    cfg = config
    if dictionary is None:
        dictionary = make_dictionary(dataset.n, cfg.hidden, cfg.d, cfg.activations,
                                     cfg.include_constant, cfg.seed)
    dic = dictionary
    rng = make_rng(cfg.seed, 2)
    net = dic.net
    state = AdamState.zeros(net.arrays()) if net is not None else None
    curve: List[float] = []
    bs = dataset.M if cfg.batch_size is None else min(cfg.batch_size, dataset.M)
    epochs_run = 0
    for epoch in range(cfg.epochs):
        cur = dic.with_net(net)
        pair = ObservablePair(lift(cur, dataset.X_t), lift(cur, dataset.X_tdt), dataset.dt)
        K = edmd_fit(pair, cfg.tikhonov, cfg.fit_rcond, cfg.svd_method, cfg.tikhonov_gram)
        R = pair.psi_tdt - K @ pair.psi_t
        loss = float(np.sum(R * R) / dataset.M)
        if not np.isfinite(loss):
            raise TrainingError(f"alternating loss became {loss} at epoch {epoch}", checkpoint=net,
                                epoch=epoch)
        curve.append(loss)
        epochs_run = epoch + 1
        if net is None or cfg.inner_epochs == 0:
            break
        lr = step_lr(epoch, cfg.epochs, cfg.lr, cfg.lr_late)
        for _ in range(cfg.inner_epochs):
            perm = rng.permutation(dataset.M)
            for start in range(0, dataset.M, bs):
                idx = perm[start : start + bs]
                _, grads = _fixed_k_loss_grad(dic.with_net(net), K, dataset.X_t[:, idx],
                                              dataset.X_tdt[:, idx])
                net = _checked_step(net, grads, state, lr, loss, epoch, net)
    dic = dic.with_net(net)
    pair = ObservablePair(lift(dic, dataset.X_t), lift(dic, dataset.X_tdt), dataset.dt)
    K = edmd_fit(pair, cfg.tikhonov, cfg.fit_rcond, cfg.svd_method, cfg.tikhonov_gram)
    meta = {
        "method": "kdl-alternating",
        "epochs": epochs_run,
        "loss_curve": curve,
        "tikhonov": cfg.tikhonov,
        "rcond": cfg.rcond,
        "seed": cfg.seed,
        "config": cfg.as_dict(),
    }
    return KoopmanModel(K, dic, dataset.dt, meta)


# --------------------------------------------------------------------------
# time evolution


def _as_batch(model, x0):
    x0 = np.asarray(x0, dtype=float)
    single = x0.ndim == 1
    X0 = x0[:, None] if single else x0
    if X0.shape[0] != model.n:
        raise DimensionError(f"initial state has {X0.shape[0]} entries, model expects {model.n}")
    return X0, single


def _package(model, states, single, mode, **meta):
    """``states`` is ``(Nt+1, n, B)``."""
    trajs = [
        Trajectory(states[:, :, b].T, model.dt, meta={"mode": mode, **meta})
        for b in range(states.shape[2])
    ]
    return trajs[0] if single else trajs


def rollout_observable_only(model: KoopmanModel, X0, Nt) -> np.ndarray:
    """Linear evolution in observable space. Returns ``(Nt+1, n, B)``."""
    dic = model.dictionary
    psi = lift(dic, X0)
    out = np.empty((int(Nt) + 1, dic.n, psi.shape[1]))
    out[0] = readback(psi, dic)
    for i in range(1, int(Nt) + 1):
        psi = model.K @ psi
        out[i] = psi[: dic.n]
    return out


def rollout_state_observable(model: KoopmanModel, X0, Nt, m=1) -> np.ndarray:
    """Evolve ``m`` steps in observable space, read the state back, re-lift, repeat."""
    if m < 1:
        raise ConfigError("m must be at least 1")
    dic = model.dictionary
    psi = lift(dic, X0)
    out = np.empty((int(Nt) + 1, dic.n, psi.shape[1]))
    out[0] = readback(psi, dic)
    for i in range(1, int(Nt) + 1):
        psi = model.K @ psi
        out[i] = psi[: dic.n]
        if i % m == 0 and i < Nt:
            psi = lift(dic, out[i])
    return out


def evolve_observable_only(model: KoopmanModel, x0, Nt):
    """Lift once, then iterate ``K``; a ``Trajectory`` (or list, for a batch ``(n, B)``)."""
    X0, single = _as_batch(model, x0)
    return _package(model, rollout_observable_only(model, X0, Nt), single, "oo")


def evolve_state_observable(model: KoopmanModel, x0, Nt, m=1):
    """Alternate between state and observable space every ``m`` steps.

    ``m=1`` re-lifts after every step; ``m >= Nt`` is identical to
    :func:`evolve_observable_only`.
    """
    X0, single = _as_batch(model, x0)
    return _package(model, rollout_state_observable(model, X0, Nt, m), single, "so", m=m)


# --------------------------------------------------------------------------
# spectrum


@dataclass
class KoopmanSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)


def spectrum(model, vectors=False) -> KoopmanSpectrum:
    """Eigenvalues of ``K`` (descending modulus), optionally with unit-norm eigenvectors."""
    K = model.K if isinstance(model, KoopmanModel) else np.asarray(model, dtype=float)
    if not np.all(np.isfinite(K)):
        raise NumericalError("K has non-finite entries")
    lam = eigvals(K)
    V = eigvecs(K, lam) if vectors else None
    return KoopmanSpectrum(lam, V)


__all__ = [
    "DictionaryNet",
    "KoopmanModel",
    "KoopmanSpectrum",
    "ObservablePair",
    "TrainConfig",
    "edmd_fit",
    "evolve_observable_only",
    "evolve_state_observable",
    "kdla_loss",
    "kdla_loss_grad",
    "lift",
    "make_dictionary",
    "readback",
    "rollout_observable_only",
    "rollout_state_observable",
    "spectrum",
    "train_kdl_alternating",
    "train_kdla",
]
