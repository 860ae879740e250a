"""End-to-end reproduction runs, one per benchmark case.

Each case generates its data, trains the applicable models at the configured
budget and writes the plot-ready CSV tables behind every figure, plus a JSON
summary. Nothing time-dependent is written, so two runs with the same seed
produce byte-identical files.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from .errors import KdlaError
from .koopman import (
    KoopmanModel,
    rollout_observable_only,
    rollout_state_observable,
    train_kdl_alternating,
    train_kdla,
)
from .metrics import (
    basin_map,
    energy,
    power_spectrum,
    spectrum_report,
    tracking_error,
)
from .node import NodeModel, node_evolve, train_node
from .persist import write_csv, write_dataset, write_json, write_trajectory
from .presets import (
    Arch,
    BASELINE_ARCH,
    baseline_config,
    budget_label,
    kdla_arch,
    kdla_config,
    node_config,
    table_shape,
)
from .systems import (
    Duffing,
    Trajectory,
    generate_dataset,
    generate_trajectories,
    recipe,
    sample_ics,
    simulate,
    stuart_landau_exact,
    system_to_dict,
)

log = logging.getLogger(__name__)


@dataclass
class RunContext:
    out: Path
    seed: int = 0
    paper_scale: bool = False
    threads: int = 1
    overrides: Dict[str, dict] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def path(self, *parts) -> Path:
        p = self.out.joinpath(*parts)
        p.parent.mkdir(parents=True, exist_ok=True)
        return p


@contextmanager
def stage(label: str):
    """Prefix any package error raised inside with ``[label]``."""
    log.info("stage %s", label)
    try:
        yield
    except KdlaError as exc:
        msg = exc.args[0] if exc.args else ""
        exc.args = (f"[{label}] {msg}",) + tuple(exc.args[1:])
        raise


# --------------------------------------------------------------------------
# shared helpers


def _with_overrides(ctx, method, cfg):
    from .presets import apply_overrides

    extra = ctx.overrides.get(method, {})
    return apply_overrides(cfg, extra) if extra else cfg


def _data(ctx, name, **rec_kw):
    rec = recipe(name, paper_scale=ctx.paper_scale, seed=ctx.seed)
    for k, v in rec_kw.items():
        setattr(rec, k, v)
    with stage("generate"):
        trajs = generate_trajectories(rec, workers=ctx.threads)
        ds = generate_dataset(rec, trajs=trajs)
        write_dataset(ctx.path("data", "dataset"), ds)
    ctx.summary["dataset"] = {"recipe": name, "M": ds.M, "n": ds.n, "dt": ds.dt}
    return rec, trajs, ds


def _save_model(ctx, label, model):
    with stage(f"save {label}"):
        model.save(ctx.path("models", f"{label}.json"))
        curve = np.asarray(model.meta.get("loss_curve", []), dtype=float)
        write_csv(ctx.path(f"loss_{label}.csv"), ["epoch", "loss"],
                  np.column_stack([np.arange(curve.size), curve]) if curve.size else np.empty((0, 2)))


def _train_kdla(ctx, case, ds, validation=None, label="kdla"):
    cfg = _with_overrides(ctx, "kdla", kdla_config(case, ctx.paper_scale, ctx.seed))
    with stage(f"train {label}"):
        model = train_kdla(ds, cfg, validation=validation)
    model.meta["budget"] = budget_label(case, "kdla", ctx.paper_scale)
    model.meta["architecture"] = table_shape(case)
    _save_model(ctx, label, model)
    return model


def _train_baseline(ctx, case, ds, arch: Optional[Arch] = None, label="kdl"):
    cfg = _with_overrides(ctx, "kdl-alternating", baseline_config(case, ctx.paper_scale, ctx.seed, arch))
    with stage(f"train {label}"):
        model = train_kdl_alternating(ds, cfg)
    model.meta["budget"] = budget_label(case, "kdl-alternating", ctx.paper_scale)
    _save_model(ctx, label, model)
    return model


def _train_node(ctx, case, ds, label="node"):
    cfg = _with_overrides(ctx, "node", node_config(case, ctx.paper_scale, ctx.seed))
    with stage(f"train {label}"):
        model = train_node(ds, cfg)
    model.meta["budget"] = budget_label(case, "node", ctx.paper_scale)
    _save_model(ctx, label, model)
    return model


def rollout(model, X0, Nt, mode="oo", m=1) -> np.ndarray:
    """``(B, n, Nt+1)`` predictions; NODE rollouts that fail are padded with ``nan``."""
    X0 = np.asarray(X0, dtype=float)
    if X0.ndim == 1:
        X0 = X0[:, None]
    if isinstance(model, NodeModel):
        trajs = node_evolve(model, X0, Nt)
        out = np.full((X0.shape[1], X0.shape[0], Nt + 1), np.nan)
        for b, tr in enumerate(trajs):
            out[b, :, : tr.states.shape[1]] = tr.states
        return out
    with np.errstate(all="ignore"):
        P = rollout_observable_only(model, X0, Nt) if mode == "oo" else rollout_state_observable(model, X0, Nt, m)
    return np.transpose(P, (2, 1, 0))


def _tracking(truth: np.ndarray, preds: Dict[str, np.ndarray], dt):
    """Tracking-error table; ``truth`` and each prediction are ``(B, n, T)``."""
    cols, summary = [], {}
    times = None
    for label, P in preds.items():
        rep = tracking_error(truth, P, dt=dt)
        times = rep.times
        cols.append(rep.error)
        summary[label] = rep
    return times, cols, summary


def _eig_table(ctx, label, model):
    rep = spectrum_report(model, tol=1e-6)
    lam = rep.eigenvalues
    write_csv(ctx.path(f"eigenvalues_{label}.csv"), ["real", "imag", "modulus", "unit_circle_distance"],
              np.column_stack([lam.real, lam.imag, rep.moduli, rep.distances]))
    return {"max_modulus": rep.max_modulus, "n_outside_unit_circle": rep.n_outside}


def _series_csv(ctx, name, times, columns: Dict[str, np.ndarray]):
    header = ["t", *columns]
    write_csv(ctx.path(name), header, np.column_stack([times, *columns.values()]))


def _traj_csv(ctx, name, states, dt, t0=0.0):
    write_trajectory(ctx.path(f"{name}.csv"), Trajectory(states, dt, t0))


def _spectra(ctx, name, signals: Dict[str, np.ndarray], dt, probe=None):
    """Power spectra of ``(n, T)`` signals; non-finite predictions give ``nan`` rows."""
    cols, dom = {}, {}
    bins = freqs = None
    for label, S in signals.items():
        rep = power_spectrum(np.nan_to_num(S, nan=0.0, posinf=0.0, neginf=0.0), dt=dt, probe=probe)
        p = rep.power if np.all(np.isfinite(S)) else np.full_like(rep.power, np.nan)
        bins, freqs = rep.bins, rep.frequencies
        cols[label] = p
        dom[label] = int(rep.dominant_bin) if np.all(np.isfinite(S)) else None
    write_csv(ctx.path(name), ["bin", "frequency", *cols],
              np.column_stack([bins, freqs, *cols.values()]))
    return dom


def _finite_max(x):
    x = np.asarray(x, dtype=float)
    return float(np.max(x)) if np.all(np.isfinite(x)) else float("inf")


# --------------------------------------------------------------------------
# cases

DUFFING_EXAMPLE_IC = np.array([-1.5, 1.8])


def run_duffing(ctx: RunContext):
    rec, _, ds = _data(ctx, "duffing")
    m_a = _train_kdla(ctx, "duffing", ds)
    m_b = _train_baseline(ctx, "duffing", ds)
    m_n = _train_node(ctx, "duffing", ds)
    n_test = 1000 if ctx.paper_scale else 400
    Nt = 100
    with stage("truth"):
        X0 = sample_ics(rec, n_test, stream=1)
        truth_tr = simulate(rec, X0, t_end=Nt * rec.dt)
        truth = np.stack([tr.states for tr in truth_tr])
    with stage("evaluate"):
        preds = {
            "kdla_oo": rollout(m_a, X0, Nt, "oo"),
            "kdl_oo": rollout(m_b, X0, Nt, "oo"),
            "kdl_so": rollout(m_b, X0, Nt, "so", 1),
            "node": rollout(m_n, X0, Nt),
        }
        times, cols, reps = _tracking(truth, preds, rec.dt)
        _series_csv(ctx, "tracking_error.csv", times, dict(zip(preds, cols)))
        sweep = {f"m{m}": rollout(m_b, X0, Nt, "so", m) for m in (1, 5, 15)}
        times, cols, sweep_reps = _tracking(truth, sweep, rec.dt)
        _series_csv(ctx, "msweep_error.csv", times, dict(zip(sweep, cols)))

        x0 = DUFFING_EXAMPLE_IC
        ex_truth = simulate(rec, x0, t_end=Nt * rec.dt)[0].states
        _traj_csv(ctx, "trajectory_truth", ex_truth, rec.dt)
        for label, (model, mode, m) in {"kdla_oo": (m_a, "oo", 1), "kdl_oo": (m_b, "oo", 1),
                                        "kdl_so": (m_b, "so", 1), "node": (m_n, "oo", 1)}.items():
            _traj_csv(ctx, f"trajectory_{label}", rollout(model, x0, Nt, mode, m)[0], rec.dt)
        for m in (1, 5, 15):
            _traj_csv(ctx, f"trajectory_msweep_m{m}", rollout(m_b, x0, Nt, "so", m)[0], rec.dt)

        sources = {
            "truth": basin_map(Duffing(), X0, substeps=rec.substeps),
            "kdla_oo": basin_map(m_a, X0, mode="oo"),
            "kdl_oo": basin_map(m_b, X0, mode="oo"),
            "kdl_so": basin_map(m_b, X0, mode="so", m=1),
            "node": basin_map(m_n, X0),
        }
        header = ["x1_0", "x2_0"]
        cols = [X0[0], X0[1]]
        for label, rep in sources.items():
            header += [f"final_x1_{label}", f"label_{label}"]
            cols += [rep.final_x1, rep.labels]
        write_csv(ctx.path("basin.csv"), header, np.column_stack(cols))
        eig = _eig_table(ctx, "kdla", m_a)
        eig_b = _eig_table(ctx, "kdl", m_b)
    ctx.summary.update({
        "tracking_error_t2": {k: r.at(2.0) for k, r in reps.items()},
        "tracking_error_t5": {k: r.at(5.0) for k, r in reps.items()},
        "msweep_error_t5": {k: r.at(5.0) for k, r in sweep_reps.items()},
        "basin_agreement": {k: sources[k].agreement(sources["truth"]) for k in sources if k != "truth"},
        "n_test": n_test,
        "spectrum_kdla": eig,
        "spectrum_kdl": eig_b,
    })


def run_rossler(ctx: RunContext):
    rec, _, ds = _data(ctx, "rossler")
    m_a = _train_kdla(ctx, "rossler", ds)
    m_b = _train_baseline(ctx, "rossler", ds)
    m_n = _train_node(ctx, "rossler", ds)
    Nt = 1000
    with stage("truth"):
        x0 = sample_ics(rec, 1, stream=1)
        truth = simulate(rec, x0, t_end=rec.transient + Nt * rec.dt)[0]
    with stage("evaluate"):
        start = truth.states[:, 0]
        preds = {"kdla_oo": rollout(m_a, start, Nt)[0], "kdl_oo": rollout(m_b, start, Nt)[0],
                 "node": rollout(m_n, start, Nt)[0]}
        _traj_csv(ctx, "trajectory_truth", truth.states, rec.dt)
        for label, P in preds.items():
            _traj_csv(ctx, f"trajectory_{label}", P, rec.dt)
        dom = _spectra(ctx, "power_spectrum.csv", {"truth": truth.states, **preds}, rec.dt)
        eig = _eig_table(ctx, "kdla", m_a)
        eig_b = _eig_table(ctx, "kdl", m_b)
    ctx.summary.update({"dominant_bin": dom, "spectrum_window": Nt * rec.dt, "spectrum_kdla": eig,
                        "spectrum_kdl": eig_b})


def _single_case(ctx, case, Nt, t_test=None, baseline=False, probes=None, spectrum_window=None,
                 continue_train=False):
    """Train, roll out one unseen IC and write trajectory, energy, spectra and eigenvalues.

    With ``continue_train`` the test segment starts where the last training
    trajectory ends, so it lies on the same attractor without repeating data.
    """
    rec, trajs, ds = _data(ctx, case)
    m_a = _train_kdla(ctx, case, ds)
    m_b = _train_baseline(ctx, case, ds) if baseline else None
    m_n = _train_node(ctx, case, ds)
    with stage("truth"):
        if continue_train:
            last = trajs[-1]
            truth = simulate(rec, last.states[:, -1], t_end=Nt * rec.dt, transient=0.0)[0]
            truth.t0 = last.t0 + last.n_steps * rec.dt
        else:
            x0 = sample_ics(rec, 1, stream=1)
            truth = simulate(rec, x0, t_end=rec.transient + Nt * rec.dt, workers=ctx.threads)[0]
    with stage("evaluate"):
        start = truth.states[:, 0]
        preds = {"kdla_oo": rollout(m_a, start, Nt)[0]}
        if m_b is not None:
            preds["kdl_oo"] = rollout(m_b, start, Nt)[0]
        preds["node"] = rollout(m_n, start, Nt)[0]
        every = {"truth": truth.states, **preds}
        _traj_csv(ctx, "trajectory_truth", truth.states, rec.dt, truth.t0)
        for label, P in preds.items():
            _traj_csv(ctx, f"trajectory_{label}", P, rec.dt, truth.t0)
        times = truth.t0 + rec.dt * np.arange(Nt + 1)
        E = {k: energy(v) for k, v in every.items()}
        _series_csv(ctx, "energy.csv", times, E)
        if probes:
            cols = {f"{k}_x{idx}": v[idx] for idx in probes for k, v in every.items()}
            _series_csv(ctx, "probes.csv", times, cols)
        w = Nt if spectrum_window is None else spectrum_window
        dom = _spectra(ctx, "power_spectrum.csv", {k: v[:, : w + 1] for k, v in every.items()}, rec.dt)
        eig = _eig_table(ctx, "kdla", m_a)
        if m_b is not None:
            ctx.summary["spectrum_kdl"] = _eig_table(ctx, "kdl", m_b)
        err = {k: float(np.linalg.norm(v - truth.states, axis=0).max() /
                        np.linalg.norm(truth.states, axis=0).mean()) for k, v in preds.items()}
    E0 = E["kdla_oo"][0]
    ctx.summary.update({
        "spectrum_kdla": eig,
        "dominant_bin": dom,
        "max_normalized_error": err,
        "energy_change_kdla": float((E["kdla_oo"][-1] - E0) / E0),
        "energy_max_deviation_kdla": _finite_max(np.abs(E["kdla_oo"] / E0 - 1.0)),
        "horizon": Nt * rec.dt,
    })
    return rec, truth, preds


def run_cylinder(ctx):
    _single_case(ctx, "cylinder", Nt=200)


def run_burgers(ctx):
    # u(0, t) and u(0.5, t) on the 64-point grid over [-1, 1)
    _single_case(ctx, "burgers", Nt=200, probes=(32, 48))


def run_kse_tw(ctx):
    _single_case(ctx, "kse-tw", Nt=1000, probes=(32,))


def run_kse_beating(ctx):
    # from random ICs the chaotic transient at L=29.30 can outlast any fixed cut
    _single_case(ctx, "kse-beating", Nt=4000, baseline=True, probes=(32,), continue_train=True)


def run_kse_chaos(ctx: RunContext):
    rec, _, ds = _data(ctx, "kse-chaos")
    m_a = _train_kdla(ctx, "kse-chaos", ds)
    m_n = _train_node(ctx, "kse-chaos", ds)
    Nt, n_starts, spacing = 500, 20, 100
    with stage("truth"):
        x0 = sample_ics(rec, 1, stream=1)
        long = simulate(rec, x0, t_end=rec.transient + (n_starts * spacing + Nt) * rec.dt)[0]
        idx = np.arange(n_starts) * spacing
        truth = np.stack([long.states[:, i : i + Nt + 1] for i in idx])
    with stage("evaluate"):
        starts = long.states[:, idx]
        preds = {"kdla_oo": rollout(m_a, starts, Nt), "node": rollout(m_n, starts, Nt)}
        times, cols, reps = _tracking(truth, preds, rec.dt)
        _series_csv(ctx, "tracking_error.csv", times, dict(zip(preds, cols)))
        _traj_csv(ctx, "trajectory_truth", truth[0], rec.dt)
        for label, P in preds.items():
            _traj_csv(ctx, f"trajectory_{label}", P[0], rec.dt)
        E = {"truth": energy(truth[0]), **{k: energy(P[0]) for k, P in preds.items()}}
        _series_csv(ctx, "energy.csv", times, E)
        dom = _spectra(ctx, "power_spectrum.csv", {"truth": truth[0], **{k: P[0] for k, P in preds.items()}},
                       rec.dt)
        eig = _eig_table(ctx, "kdla", m_a)
    early = times < 10.0
    ctx.summary.update({
        "max_tracking_error_t_lt_10": {k: _finite_max(r.error[early]) for k, r in reps.items()},
        "tracking_error_t10": {k: r.at(10.0) for k, r in reps.items()},
        "tracking_error_t25": {k: r.at(25.0) for k, r in reps.items()},
        "dominant_bin": dom,
        "spectrum_kdla": eig,
    })


def run_stuart_landau(ctx: RunContext):
    rec, trajs, ds = _data(ctx, "stuart-landau")
    # checkpoints are scored by observable-only rollout error along the training trajectory
    m_a = _train_kdla(ctx, "stuart-landau", ds, validation=trajs)
    m_n = _train_node(ctx, "stuart-landau", ds)
    Nt = trajs[0].n_steps
    with stage("evaluate"):
        times = rec.dt * np.arange(Nt + 1)
        exact = stuart_landau_exact(rec.R0, times)
        x0 = np.array([rec.R0])
        preds = {"kdla_oo": rollout(m_a, x0, Nt)[0, 0], "node": rollout(m_n, x0, Nt)[0, 0]}
        _series_csv(ctx, "trajectory.csv", times, {"exact": exact, "rk4": trajs[0].states[0], **preds})
        eig = _eig_table(ctx, "kdla", m_a)

        def crossing(R):
            above = np.nonzero(np.asarray(R) >= 1.0 / np.sqrt(2.0))[0]
            return float(times[above[0]]) if above.size else None

    ctx.summary.update({
        "rk4_max_error": float(np.abs(trajs[0].states[0] - exact).max()),
        "max_error": {k: _finite_max(np.abs(v - exact)) for k, v in preds.items()},
        "crossover_time": {"exact": crossing(exact), **{k: crossing(v) for k, v in preds.items()}},
        "spectrum_kdla": eig,
    })


def run_appendix_a(ctx: RunContext):
    rec, _, ds = _data(ctx, "duffing")
    wide = kdla_arch("duffing")
    m_small = _train_baseline(ctx, "duffing", ds, BASELINE_ARCH, label="kdl_tanh25")
    m_wide = _train_baseline(ctx, "duffing", ds, wide, label="kdl_elu102")
    n_test = 1000 if ctx.paper_scale else 400
    Nt = 100
    with stage("truth"):
        X0 = sample_ics(rec, n_test, stream=1)
        truth = np.stack([tr.states for tr in simulate(rec, X0, t_end=Nt * rec.dt)])
    with stage("evaluate"):
        preds = {"kdl_tanh25_oo": rollout(m_small, X0, Nt), "kdl_elu102_oo": rollout(m_wide, X0, Nt)}
        times, cols, reps = _tracking(truth, preds, rec.dt)
        _series_csv(ctx, "tracking_error.csv", times, dict(zip(preds, cols)))
        x0 = DUFFING_EXAMPLE_IC
        _traj_csv(ctx, "trajectory_truth", simulate(rec, x0, t_end=Nt * rec.dt)[0].states, rec.dt)
        for label, model in (("kdl_tanh25_oo", m_small), ("kdl_elu102_oo", m_wide)):
            _traj_csv(ctx, f"trajectory_{label}", rollout(model, x0, Nt)[0], rec.dt)
    ctx.summary.update({
        "tracking_error_t2": {k: r.at(2.0) for k, r in reps.items()},
        "tracking_error_t10": {k: r.at(10.0) for k, r in reps.items()},
        "n_test": n_test,
    })


CASE_RUNNERS: Dict[str, Callable[[RunContext], None]] = {
    "duffing": run_duffing,
    "rossler": run_rossler,
    "cylinder": run_cylinder,
    "burgers": run_burgers,
    "kse-tw": run_kse_tw,
    "kse-beating": run_kse_beating,
    "kse-chaos": run_kse_chaos,
    "stuart-landau": run_stuart_landau,
    "appendix-a": run_appendix_a,
}


def reproduce(case: str, ctx: RunContext) -> dict:
    """Run one case into ``ctx.out`` and write ``summary.json``; returns the summary."""
    from .errors import ConfigError

    if case not in CASE_RUNNERS:
        raise ConfigError(f"unknown case {case!r}; valid cases: {', '.join(CASE_RUNNERS)}")
    ctx.out.mkdir(parents=True, exist_ok=True)
    ctx.summary = {"case": case, "seed": ctx.seed, "paper_scale": ctx.paper_scale}
    CASE_RUNNERS[case](ctx)
    write_json(ctx.path("summary.json"), ctx.summary)
    return ctx.summary


__all__ = ["CASE_RUNNERS", "RunContext", "reproduce", "rollout", "stage"]
