"""Dense MLP forward/backward passes and the Adam optimizer.

Matrices are plain ``float64`` numpy arrays. Snapshots are stored column-wise,
so an MLP maps an ``(n, M)`` array to an ``(out, M)`` array.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .errors import DimensionError, TrainingError

ACTIVATIONS = ("elu", "tanh", "sigmoid", "linear")


def _activate(tag, z):
    if tag == "elu":
        return np.where(z > 0, z, np.expm1(np.minimum(z, 0.0)))
    if tag == "tanh":
        return np.tanh(z)
    if tag == "sigmoid":
        # split form avoids overflow in exp for large |z|
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out
    if tag == "linear":
        return z
    raise ValueError(f"unknown activation {tag!r}")


def _activate_grad(tag, z, a):
    """Derivative of the activation given pre-activation ``z`` and output ``a``."""
    if tag == "elu":
        return np.where(z > 0, 1.0, a + 1.0)
    if tag == "tanh":
        return 1.0 - a * a
    if tag == "sigmoid":
        return a * (1.0 - a)
    if tag == "linear":
        return np.ones_like(z)
    raise ValueError(f"unknown activation {tag!r}")


@dataclass
class MlpParams:
    """Weights of a fully connected network.

    ``weights[i]`` has shape ``(layer_sizes[i+1], layer_sizes[i])`` and
    ``activations[i]`` is applied after layer ``i``.
    """

    layer_sizes: List[int]
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    activations: List[str]

    def __post_init__(self):
        self.layer_sizes = [int(s) for s in self.layer_sizes]
        self.activations = [str(a).lower() for a in self.activations]
        nlayers = len(self.layer_sizes) - 1
        if nlayers < 1:
            raise DimensionError("an MLP needs at least an input and an output size")
        if len(self.weights) != nlayers or len(self.biases) != nlayers:
            raise DimensionError("weights/biases count does not match layer_sizes")
        if len(self.activations) != nlayers:
            raise DimensionError(
                f"expected {nlayers} activation tags, got {len(self.activations)}"
            )
        for tag in self.activations:
            if tag not in ACTIVATIONS:
                raise ValueError(f"unknown activation {tag!r}; choose from {ACTIVATIONS}")
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            shape = (self.layer_sizes[i + 1], self.layer_sizes[i])
            if W.shape != shape:
                raise DimensionError(f"weights[{i}] has shape {W.shape}, expected {shape}")
            if b.shape != (shape[0],):
                raise DimensionError(f"biases[{i}] has shape {b.shape}, expected {(shape[0],)}")

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def n_in(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_out(self) -> int:
        return self.layer_sizes[-1]

    def arrays(self) -> List[np.ndarray]:
        """Parameters as a flat list ``[W0, b0, W1, b1, ...]``."""
        out = []
        for W, b in zip(self.weights, self.biases):
            out.extend((W, b))
        return out

    def with_arrays(self, arrays: Sequence[np.ndarray]) -> "MlpParams":
        return MlpParams(
            list(self.layer_sizes),
            [np.asarray(a, dtype=float) for a in arrays[0::2]],
            [np.asarray(a, dtype=float) for a in arrays[1::2]],
            list(self.activations),
        )

    def copy(self) -> "MlpParams":
        return self.with_arrays([a.copy() for a in self.arrays()])

    def zeros_like(self) -> "MlpParams":
        return self.with_arrays([np.zeros_like(a) for a in self.arrays()])

    def n_params(self) -> int:
        return sum(a.size for a in self.arrays())


def init_mlp(layer_sizes, activations, rng) -> MlpParams:
    """Glorot-uniform weights, zero biases.

    ``activations`` may be a single tag (used for every layer) or one tag per layer.
    ``rng`` is a ``numpy.random.Generator`` or an integer seed.
    """
    if not isinstance(rng, np.random.Generator):
        rng = make_rng(rng)
    layer_sizes = [int(s) for s in layer_sizes]
    nlayers = len(layer_sizes) - 1
    if isinstance(activations, str):
        activations = [activations] * nlayers
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpParams(layer_sizes, weights, biases, list(activations))


def make_rng(seed, *stream) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by ``seed`` and optional stream ids."""
    ss = np.random.SeedSequence([int(seed), *[int(s) for s in stream]])
    return np.random.Generator(np.random.Philox(ss))


@dataclass
class MlpCache:
    inputs: List[np.ndarray]
    pre: List[np.ndarray]
    post: List[np.ndarray]


def mlp_forward(params: MlpParams, X):
    """Apply the network column-wise.

    Returns
    -------
    Y : (n_out, M) ndarray
    cache : MlpCache
        Per-layer inputs, pre-activations and outputs for :func:`mlp_backward`.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != params.n_in:
        raise DimensionError(f"input has shape {X.shape}, expected ({params.n_in}, M)")
    if X.shape[1] < 1:
        raise DimensionError("input needs at least one column")
    inputs, pre, post = [], [], []
    a = X
    for W, b, tag in zip(params.weights, params.biases, params.activations):
        inputs.append(a)
        z = W @ a + b[:, None]
        a = _activate(tag, z)
        pre.append(z)
        post.append(a)
    return a, MlpCache(inputs, pre, post)


def mlp_backward(params: MlpParams, cache: MlpCache, upstream):
    """Reverse-mode pass for ``<upstream, Y>``.

    Returns
    -------
    grads : MlpParams
        Same shapes as ``params``.
    dX : (n_in, M) ndarray
    """
    upstream = np.asarray(upstream, dtype=float)
    if len(cache.pre) != params.n_layers:
        raise DimensionError("cache does not belong to these parameters")
    if upstream.shape != cache.post[-1].shape:
        raise DimensionError(
            f"upstream has shape {upstream.shape}, expected {cache.post[-1].shape}"
        )
    dW = [None] * params.n_layers
    db = [None] * params.n_layers
    g = upstream
    for i in reversed(range(params.n_layers)):
        W = params.weights[i]
        if cache.pre[i].shape[0] != W.shape[0]:
            raise DimensionError("stale cache: layer widths changed")
        dz = g * _activate_grad(params.activations[i], cache.pre[i], cache.post[i])
        dW[i] = dz @ cache.inputs[i].T
        db[i] = dz.sum(axis=1)
        g = W.T @ dz
    grads = MlpParams(list(params.layer_sizes), dW, db, list(params.activations))
    return grads, g


@dataclass
class AdamState:
    m: List[np.ndarray]
    v: List[np.ndarray]
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros(cls, arrays, **kw) -> "AdamState":
        return cls([np.zeros_like(a) for a in arrays], [np.zeros_like(a) for a in arrays], **kw)


def adam_step(params, grads, state: AdamState, lr: float):
    """One bias-corrected Adam update.

    ``params`` and ``grads`` are either :class:`MlpParams` or matching lists of
    arrays; the return value has the same kind as ``params``. ``state`` is
    advanced in place and also returned.
    """
    as_mlp = isinstance(params, MlpParams)
    p_list = params.arrays() if as_mlp else list(params)
    g_list = grads.arrays() if isinstance(grads, MlpParams) else list(grads)
    if len(p_list) != len(g_list) or len(p_list) != len(state.m):
        raise DimensionError("params, grads and optimizer state disagree in length")
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    for g in g_list:
        if not np.all(np.isfinite(g)):
            raise TrainingError(f"non-finite gradient at optimizer step {state.step + 1}")
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**state.step
    c2 = 1.0 - b2**state.step
    new = []
    for k, (p, g) in enumerate(zip(p_list, g_list)):
        if p.shape != g.shape or p.shape != state.m[k].shape:
            raise DimensionError(f"shape mismatch in parameter {k}")
        state.m[k] = b1 * state.m[k] + (1.0 - b1) * g
        state.v[k] = b2 * state.v[k] + (1.0 - b2) * g * g
        mhat = state.m[k] / c1
        vhat = state.v[k] / c2
        new.append(p - lr * mhat / (np.sqrt(vhat) + state.eps))
    if as_mlp:
        return params.with_arrays(new), state
    return new, state


def step_lr(epoch: int, epochs: int, lr: float = 1e-3, lr_late: float = 1e-4) -> float:
    """Two-level schedule: ``lr`` for the first half of training, ``lr_late`` after."""
    return lr if epoch < epochs // 2 else lr_late


def mlp_to_dict(params: MlpParams) -> dict:
    return {
        "layer_sizes": list(params.layer_sizes),
        "activations": list(params.activations),
        "weights": [W.ravel().tolist() for W in params.weights],
        "biases": [b.tolist() for b in params.biases],
    }


def mlp_from_dict(d: dict) -> MlpParams:
    sizes = [int(s) for s in d["layer_sizes"]]
    weights = [
        np.asarray(w, dtype=float).reshape(sizes[i + 1], sizes[i])
        for i, w in enumerate(d["weights"])
    ]
    biases = [np.asarray(b, dtype=float) for b in d["biases"]]
    return MlpParams(sizes, weights, biases, list(d["activations"]))


__all__ = [
    "ACTIVATIONS",
    "AdamState",
    "MlpCache",
    "MlpParams",
    "adam_step",
    "init_mlp",
    "make_rng",
    "mlp_backward",
    "mlp_forward",
    "mlp_from_dict",
    "mlp_to_dict",
    "step_lr",
]
