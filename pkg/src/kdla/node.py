"""Neural-ODE state-space baseline.

The vector field is an MLP ``f(x; theta)``. One data interval ``dt`` is covered by
``substeps`` classical RK4 steps and the one-step loss is differentiated through
every RK4 stage (discretize, then differentiate).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
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
from .systems import SnapshotDataset, Trajectory

NODE_VERSION = "node-model/1"
AUGMENTATIONS = ("none", "periodic")


def periodic_augment(X, Y, rng):
    """Apply one random grid shift and, with probability 1/2, the reflection
    ``u(x) -> -u(-x)`` to both snapshot matrices.

    Valid for translation- and reflection-equivariant periodic fields such as the
    Kuramoto-Sivashinsky equation on a uniform grid.
    """
    n = X.shape[0]
    shift = int(rng.integers(n))
    X = np.roll(X, shift, axis=0)
    Y = np.roll(Y, shift, axis=0)
    if rng.random() < 0.5:
        idx = (-np.arange(n)) % n
        X, Y = -X[idx], -Y[idx]
    return X, Y


@dataclass
class NodeModel:
    """MLP vector field plus the step it was trained for."""

    net: MlpParams
    dt: float
    substeps: int = 1
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.net.n_in != self.net.n_out:
            raise DimensionError(
                f"vector field must map R^n to R^n, got {self.net.n_in} -> {self.net.n_out}"
            )
        if int(self.substeps) < 1:
            raise ConfigError("substeps must be at least 1")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        self.substeps = int(self.substeps)
        self.dt = float(self.dt)

    @property
    def n(self) -> int:
        return self.net.n_in

    def to_dict(self) -> dict:
        return {
            "version": NODE_VERSION,
            "n": self.n,
            "dt": self.dt,
            "substeps": self.substeps,
            "net": mlp_to_dict(self.net),
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NodeModel":
        if d.get("version") != NODE_VERSION:
            raise ConfigError(f"unsupported model version {d.get('version')!r}")
        model = cls(mlp_from_dict(d["net"]), float(d["dt"]), int(d["substeps"]), dict(d.get("meta", {})))
        if model.n != int(d["n"]):
            raise ConfigError("model file: n does not match the network width")
        return model

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path) -> "NodeModel":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class NodeTrainConfig:
    hidden: Sequence[int] = (200, 200)
    activations: object = ("sigmoid", "sigmoid", "linear")
    epochs: int = 1000
    lr: float = 1e-3
    lr_late: float = 1e-4
    seed: int = 0
    substeps: int = 1
    batch_size: Optional[int] = None
    augment: str = "none"

    def __post_init__(self):
        if self.augment not in AUGMENTATIONS:
            raise ConfigError(f"augment must be one of {AUGMENTATIONS}, got {self.augment!r}")
        if int(self.epochs) < 1:
            raise ConfigError("epochs must be at least 1")
        if int(self.substeps) < 1:
            raise ConfigError("substeps must be at least 1")

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["hidden"] = list(self.hidden)
        if not isinstance(self.activations, str):
            d["activations"] = list(self.activations)
        return d


def make_node(n, hidden=(200, 200), activations=("sigmoid", "sigmoid", "linear"), dt=0.1,
              substeps=1, seed=0) -> NodeModel:
    net = init_mlp([n, *hidden, n], activations, make_rng(seed, 3))
    return NodeModel(net, dt, substeps)


def _as_cols(model, x):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[:, None] if single else x
    if X.shape[0] != model.n:
        raise DimensionError(f"state has {X.shape[0]} rows, model expects {model.n}")
    return X, single


def _rk4_forward(net, X, h, substeps, keep=False):
    """Returns the advanced states and, if ``keep``, per-substep stage caches."""
    tape = []
    x = X
    for _ in range(substeps):
        k1, c1 = mlp_forward(net, x)
        k2, c2 = mlp_forward(net, x + 0.5 * h * k1)
        k3, c3 = mlp_forward(net, x + 0.5 * h * k2)
        k4, c4 = mlp_forward(net, x + h * k3)
        if keep:
            tape.append((c1, c2, c3, c4))
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x, tape


def _rk4_backward(net, tape, h, gx):
    """Adjoint of :func:`_rk4_forward` for upstream ``gx`` on the final state."""
    acc = [np.zeros_like(a) for a in net.arrays()]

    def pull(cache, g):
        grads, dz = mlp_backward(net, cache, g)
        for i, a in enumerate(grads.arrays()):
            acc[i] += a
        return dz

    for c1, c2, c3, c4 in reversed(tape):
        gk1 = (h / 6.0) * gx
        gk2 = (h / 3.0) * gx
        gk3 = (h / 3.0) * gx
        gk4 = (h / 6.0) * gx
        gx = gx.copy()
        dz = pull(c4, gk4)
        gx += dz
        gk3 = gk3 + h * dz
        dz = pull(c3, gk3)
        gx += dz
        gk2 = gk2 + 0.5 * h * dz
        dz = pull(c2, gk2)
        gx += dz
        gk1 = gk1 + 0.5 * h * dz
        gx += pull(c1, gk1)
    return net.with_arrays(acc), gx


def node_predict(model: NodeModel, x):
    """State one interval ``dt`` later. ``x`` may be a vector or ``(n, B)`` columns."""
    X, single = _as_cols(model, x)
    with np.errstate(over="ignore", invalid="ignore"):
        Y, _ = _rk4_forward(model.net, X, model.dt / model.substeps, model.substeps)
    if not np.all(np.isfinite(Y)):
        raise NumericalError("non-finite state inside the RK4 step")
    return Y[:, 0] if single else Y


def node_loss(model: NodeModel, X_t, X_tdt, grad=True):
    """Mean squared one-step error ``sum |x(t+dt) - pred|^2 / (n N)``.

    Returns ``(loss, grads)``; ``grads`` is ``None`` when ``grad`` is false.
    """
    X_t = np.asarray(X_t, dtype=float)
    X_tdt = np.asarray(X_tdt, dtype=float)
    if X_t.shape != X_tdt.shape or X_t.ndim != 2:
        raise DimensionError("X_t and X_tdt must be matching (n, N) arrays")
    if X_t.shape[0] != model.n:
        raise DimensionError(f"data has {X_t.shape[0]} rows, model expects {model.n}")
    h = model.dt / model.substeps
    with np.errstate(over="ignore", invalid="ignore"):
        pred, tape = _rk4_forward(model.net, X_t, h, model.substeps, keep=grad)
    if not np.all(np.isfinite(pred)):
        raise NumericalError("non-finite state inside the RK4 step")
    R = X_tdt - pred
    scale = 1.0 / R.size
    loss = float(np.sum(R * R) * scale)
    if not grad:
        return loss, None
    grads, _ = _rk4_backward(model.net, tape, h, -2.0 * scale * R)
    return loss, grads


def train_node(dataset: SnapshotDataset, config: NodeTrainConfig, model: Optional[NodeModel] = None) -> NodeModel:
    """Adam on the one-step loss; the parameters with the lowest epoch loss are returned."""
    cfg = config
    if model is None:
        model = make_node(dataset.n, cfg.hidden, cfg.activations, dataset.dt, cfg.substeps, cfg.seed)
    if model.n != dataset.n:
        raise DimensionError("model and dataset disagree on the state dimension")
    rng = make_rng(cfg.seed, 4)
    net = model.net
    state = AdamState.zeros(net.arrays())
    curve: List[float] = []
    best = (np.inf, net)
    full = cfg.batch_size is None or cfg.batch_size >= dataset.M
    for epoch in range(cfg.epochs):
        lr = step_lr(epoch, cfg.epochs, cfg.lr, cfg.lr_late)
        batches = [slice(None)] if full else [
            np.sort(idx) for idx in np.array_split(rng.permutation(dataset.M),
                                                   max(1, -(-dataset.M // cfg.batch_size)))
        ]
        losses = []
        for idx in batches:
            current = NodeModel(net, model.dt, model.substeps)
            Xb, Yb = dataset.X_t[:, idx], dataset.X_tdt[:, idx]
            if cfg.augment == "periodic":
                Xb, Yb = periodic_augment(Xb, Yb, rng)
            try:
                loss, grads = node_loss(current, Xb, Yb)
                if not np.isfinite(loss):
                    raise NumericalError(f"loss became {loss}")
                if full and cfg.augment == "none" and loss < best[0]:
                    best = (loss, net)
                net, _ = adam_step(net, grads, state, lr)
            except (NumericalError, TrainingError) as exc:
                raise TrainingError(f"{exc} (epoch {epoch})", checkpoint=best[1], epoch=epoch) from exc
            losses.append(loss)
        loss = float(np.mean(losses))
        curve.append(loss)
        if (not full or cfg.augment != "none") and loss < best[0]:
            best = (loss, net)
    meta = {
        "method": "node",
        "epochs": cfg.epochs,
        "best_loss": float(best[0]),
        "loss_curve": curve,
        "seed": cfg.seed,
        "config": cfg.as_dict(),
    }
    return NodeModel(best[1], model.dt, model.substeps, meta)


def node_evolve(model: NodeModel, x0, Nt):
    """Iterate :func:`node_predict` ``Nt`` times.

    A non-finite state stops the rollout; the returned trajectory then ends at the
    last finite sample and ``meta["truncated_at"]`` holds the failing step. For a
    batch ``(n, B)`` a list of trajectories is returned.
    """
    X, single = _as_cols(model, x0)
    Nt = int(Nt)
    if Nt < 0:
        raise ConfigError("Nt must be non-negative")
    h = model.dt / model.substeps
    out = np.empty((Nt + 1,) + X.shape)
    out[0] = X
    alive = np.full(X.shape[1], Nt + 1)
    x = X
    for i in range(1, Nt + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            x, _ = _rk4_forward(model.net, x, h, model.substeps)
        bad = ~np.all(np.isfinite(x), axis=0) & (alive == Nt + 1)
        alive[bad] = i
        out[i] = x
    trajs = []
    for b in range(X.shape[1]):
        meta = {"mode": "node"}
        if alive[b] <= Nt:
            meta["truncated_at"] = int(alive[b])
        trajs.append(Trajectory(out[: alive[b], :, b].T.copy(), model.dt, meta=meta))
    return trajs[0] if single else trajs


__all__ = [
    "NODE_VERSION",
    "NodeModel",
    "NodeTrainConfig",
    "make_node",
    "periodic_augment",
    "node_evolve",
    "node_loss",
    "node_predict",
    "train_node",
]
