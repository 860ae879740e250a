"""Evaluation quantities: tracking error, energy, DFT power spectra, eigenvalue
tables and Duffing basin maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import ConfigError, DimensionError
from .systems import Duffing, Trajectory, integrate_ensemble

BASIN_LABELS = (-1.0, 0.0, 1.0)


@dataclass
class EnsembleReport:
    """Ensemble-averaged state error per time, divided by ``normalizer``.

    ``raw`` is the same average before normalisation.
    """

    times: np.ndarray
    error: np.ndarray
    raw: np.ndarray
    size: int
    normalizer: float
    normalization: str = "mean true-state 2-norm over time and ensemble"

    def at(self, t: float) -> float:
        """Error at the sample closest to time ``t``."""
        return float(self.error[int(np.argmin(np.abs(self.times - t)))])


@dataclass
class SpectrumReport:
    """One-sided power per DFT bin; ``frequencies`` are in cycles per time unit."""

    bins: np.ndarray
    frequencies: np.ndarray
    power: np.ndarray
    source: str = ""
    n_samples: int = 0

    @property
    def dominant_bin(self) -> int:
        # bin 0 carries no power once the mean is removed
        return int(self.bins[1:][np.argmax(self.power[1:])])


@dataclass
class EigenReport:
    eigenvalues: np.ndarray
    moduli: np.ndarray
    distances: np.ndarray
    n_outside: int
    tol: float

    @property
    def max_modulus(self) -> float:
        return float(self.moduli.max()) if self.moduli.size else 0.0


@dataclass
class BasinReport:
    ics: np.ndarray
    final_x1: np.ndarray
    labels: np.ndarray
    flagged: np.ndarray
    horizon: float
    source: str = ""

    def agreement(self, other: "BasinReport") -> float:
        """Fraction of unflagged ICs given the same label by both maps."""
        if self.labels.shape != other.labels.shape:
            raise DimensionError("basin maps cover different IC sets")
        ok = ~(self.flagged | other.flagged)
        return float(np.mean((self.labels == other.labels) & ok))


def _stack(ensemble) -> np.ndarray:
    """``(B, n, T)`` array from trajectories or arrays."""
    if isinstance(ensemble, Trajectory):
        ensemble = [ensemble]
    if isinstance(ensemble, np.ndarray):
        arr = ensemble[None] if ensemble.ndim == 2 else ensemble
    else:
        mats = [tr.states if isinstance(tr, Trajectory) else np.asarray(tr, dtype=float)
                for tr in ensemble]
        if not mats:
            raise DimensionError("empty ensemble")
        if len({m.shape for m in mats}) != 1:
            raise DimensionError("ensemble members differ in shape")
        arr = np.stack(mats)
    if arr.ndim != 3:
        raise DimensionError("ensemble must be (B, n, T)")
    return np.asarray(arr, dtype=float)


def tracking_error(true, pred, dt: Optional[float] = None, t0: float = 0.0) -> EnsembleReport:
    """Mean over the ensemble of ``|x - x_pred|_2`` per time sample.

    ``true`` and ``pred`` are trajectories (or ``(B, n, T)`` arrays) with matching
    shapes. The result is divided by the mean of ``|x|_2`` over all true samples.
    """
    X = _stack(true)
    P = _stack(pred)
    if X.shape != P.shape:
        raise DimensionError(f"true ensemble {X.shape} and prediction {P.shape} differ")
    if dt is None:
        first = true[0] if isinstance(true, (list, tuple)) else true
        dt = first.dt if isinstance(first, Trajectory) else 1.0
        t0 = first.t0 if isinstance(first, Trajectory) else t0
    raw = np.linalg.norm(X - P, axis=1).mean(axis=0)
    norm = float(np.linalg.norm(X, axis=1).mean())
    if norm == 0.0:
        norm = 1.0
    times = t0 + dt * np.arange(X.shape[2])
    return EnsembleReport(times, raw / norm, raw, X.shape[0], norm)


def energy(traj) -> np.ndarray:
    """Squared 2-norm of each state column."""
    S = traj.states if isinstance(traj, Trajectory) else np.atleast_2d(np.asarray(traj, dtype=float))
    return np.sum(S * S, axis=0)


def fourier_amplitudes(traj) -> np.ndarray:
    """``|rfft(u)|`` without the mean mode, per snapshot column.

    Invariant under grid translation, so a travelling wave has constant
    amplitudes and a relative-periodic orbit has periodic ones.
    """
    S = traj.states if isinstance(traj, Trajectory) else np.atleast_2d(np.asarray(traj, dtype=float))
    return np.abs(np.fft.rfft(S, axis=0))[1:]


def amplitude_recurrence(traj, lags: Sequence[int], tol: Optional[float] = None):
    """Recurrence of the Fourier amplitudes over increasing sample lags.

    For each lag the mismatch is ``max_t |A(t + lag) - A(t)| / mean_t |A(t)|``.
    Without ``tol`` the smallest mismatch is returned as ``(lag, mismatch)``.
    With ``tol`` short lags are skipped until the mismatch first exceeds ``tol``
    (the amplitudes have decorrelated); the result is then the local minimum where
    it next drops below ``tol``, so multiples of a period do not compete. If the
    mismatch never exceeds ``tol`` the first lag is returned, and if it never
    returns below, the overall minimum.
    """
    A = fourier_amplitudes(traj)
    scale = np.linalg.norm(A, axis=0).mean()
    misses = []
    for lag in lags:
        lag = int(lag)
        if lag < 1 or lag >= A.shape[1]:
            raise ConfigError(f"lag {lag} outside 1..{A.shape[1] - 1}")
        misses.append((lag, float(np.linalg.norm(A[:, lag:] - A[:, :-lag], axis=0).max() / scale)))
    if not misses:
        raise ConfigError("no lags given")
    if tol is not None:
        left = next((i for i, (_, m) in enumerate(misses) if m > tol), None)
        if left is None:
            return misses[0]
        back = next((i for i in range(left, len(misses)) if misses[i][1] < tol), None)
        if back is not None:
            while back + 1 < len(misses) and misses[back + 1][1] < misses[back][1]:
                back += 1
            return misses[back]
    return min(misses, key=lambda lm: lm[1])


def drift_period(traj, dt: float = 1.0) -> float:
    """Time for the pattern to travel one domain length.

    Taken from a least-squares line through the unwrapped phase of Fourier mode 1;
    ``inf`` when there is no drift.
    """
    S = traj.states if isinstance(traj, Trajectory) else np.atleast_2d(np.asarray(traj, dtype=float))
    if isinstance(traj, Trajectory):
        dt = traj.dt
    phase = np.unwrap(np.angle(np.fft.rfft(S, axis=0)[1]))
    speed = np.polyfit(dt * np.arange(S.shape[1]), phase, 1)[0]
    return float(2.0 * np.pi / abs(speed)) if speed != 0 else np.inf


def power_spectrum(signal, dt: float = 1.0, probe: Optional[int] = None, source: str = "") -> SpectrumReport:
    """One-sided power of the mean-removed signal, rectangular window.

    ``signal`` is a trajectory, an ``(n, N)`` array (rows are components) or a
    length-``N`` series. Vector signals are averaged over components unless
    ``probe`` selects one. With ``x`` mean-removed and ``X = rfft(x)`` the power
    is ``|X_k|^2 / N``, doubled for bins that stand for a +/- pair, so that
    ``sum(power) == N * var(x)``.
    """
    if isinstance(signal, Trajectory):
        dt = signal.dt
        S = signal.states
    else:
        S = np.asarray(signal, dtype=float)
    S = np.atleast_2d(S)
    if probe is not None:
        if not 0 <= probe < S.shape[0]:
            raise DimensionError(f"probe {probe} outside 0..{S.shape[0] - 1}")
        S = S[probe : probe + 1]
    N = S.shape[1]
    if N < 4:
        raise ConfigError(f"power spectrum needs at least 4 samples, got {N}")
    x = S - S.mean(axis=1, keepdims=True)
    F = np.fft.rfft(x, axis=1)
    p = (F.real**2 + F.imag**2) / N
    if N % 2 == 0:
        p[:, 1:-1] *= 2.0
    else:
        p[:, 1:] *= 2.0
    bins = np.arange(p.shape[1])
    return SpectrumReport(bins, bins / (N * dt), p.mean(axis=0), source, N)


def spectrum_report(model_or_eigs, tol: float = 1e-6) -> EigenReport:
    """Eigenvalues of ``K`` with ``|lambda|`` and distance to the unit circle."""
    if hasattr(model_or_eigs, "K"):
        from .koopman import spectrum

        lam = spectrum(model_or_eigs).eigenvalues
    elif hasattr(model_or_eigs, "eigenvalues"):
        lam = np.asarray(model_or_eigs.eigenvalues)
    else:
        lam = np.asarray(model_or_eigs, dtype=complex)
    mod = np.abs(lam)
    return EigenReport(lam, mod, np.abs(mod - 1.0), int(np.sum(mod > 1.0 + tol)), tol)


def basin_grid(points: int = 20, box=(-2.0, 2.0)) -> np.ndarray:
    """Regular ``points x points`` IC grid over a square, as ``(2, points^2)``."""
    g = np.linspace(box[0], box[1], points)
    a, b = np.meshgrid(g, g, indexing="ij")
    return np.vstack([a.ravel(), b.ravel()])


def basin_map(source, ics, horizon: float = 10.0, dt: float = 0.1, mode: str = "so", m: int = 1,
              substeps: int = 10) -> BasinReport:
    """Final ``x1`` at ``horizon`` for each IC column and its nearest label in {-1, 0, 1}.

    ``source`` is a :class:`Duffing` spec (the RK4 truth with ``substeps`` steps
    per ``dt``), a Koopman model (rolled out with ``mode``/``m``) or a NODE model.
    Rollouts that turn non-finite are flagged and labelled ``nan``.
    """
    from .koopman import KoopmanModel, rollout_observable_only, rollout_state_observable
    from .node import NodeModel, node_evolve

    ics = np.asarray(ics, dtype=float)
    if ics.ndim != 2 or ics.shape[0] != 2:
        raise DimensionError("basin ICs must be a (2, B) array")
    if isinstance(source, Duffing):
        Nt = int(round(horizon / dt))
        trajs = integrate_ensemble(source, ics, dt, Nt, substeps)
        final = np.array([tr.states[0, -1] if tr.n_steps == Nt else np.nan for tr in trajs])
        name = "truth"
    elif isinstance(source, KoopmanModel):
        if source.n != 2:
            raise ConfigError("basin maps need a model of a two-dimensional state")
        Nt = int(round(horizon / source.dt))
        with np.errstate(all="ignore"):
            if mode == "oo":
                out = rollout_observable_only(source, ics, Nt)
            else:
                out = rollout_state_observable(source, ics, Nt, m)
        final = out[-1, 0, :]
        name = f"koopman-{mode}" + ("" if mode == "oo" else f"-m{m}")
    elif isinstance(source, NodeModel):
        if source.n != 2:
            raise ConfigError("basin maps need a model of a two-dimensional state")
        Nt = int(round(horizon / source.dt))
        trajs = node_evolve(source, ics, Nt)
        final = np.array([tr.states[0, -1] if tr.n_steps == Nt else np.nan for tr in trajs])
        name = "node"
    else:
        raise ConfigError("basin maps are defined for the Duffing system and models trained on it")
    final = np.asarray(final, dtype=float)
    flagged = ~np.isfinite(final)
    labels = np.full(final.shape, np.nan)
    ref = np.asarray(BASIN_LABELS)
    ok = ~flagged
    labels[ok] = ref[np.argmin(np.abs(final[ok, None] - ref[None, :]), axis=1)]
    return BasinReport(ics, final, labels, flagged, float(horizon), name)


__all__ = [
    "BASIN_LABELS",
    "BasinReport",
    "EigenReport",
    "EnsembleReport",
    "SpectrumReport",
    "basin_grid",
    "basin_map",
    "amplitude_recurrence",
    "drift_period",
    "energy",
    "fourier_amplitudes",
    "power_spectrum",
    "spectrum_report",
    "tracking_error",
]
