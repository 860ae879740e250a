"""Command-line front end, run as ``python3 -m kdla <command>``.

Commands: generate, train, evolve, evaluate, spectrum, reproduce. Options can
come from a TOML file (``--config``); flags given on the command line win. The
resolved configuration is written to ``config.json`` in every output directory.
The default output root is ``$KDLA_OUTPUT_ROOT`` (or ``./runs``).

Exit status: 0 on success, 2 for configuration/usage/input errors, 3 for
numerical failures (divergence, non-finite values).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from .errors import ConfigError, DimensionError, KdlaError, NumericalError, TrainingError
from .koopman import MODEL_VERSION, KoopmanModel, train_kdl_alternating, train_kdla
from .metrics import basin_grid, basin_map, energy, power_spectrum, spectrum_report, tracking_error
from .node import NODE_VERSION, NodeModel, train_node
from .persist import (
    output_root,
    read_dataset,
    read_json,
    read_trajectory,
    write_csv,
    write_dataset,
    write_json,
    write_trajectory,
)
from .pipelines import CASE_RUNNERS, RunContext, reproduce, rollout
from .presets import (
    CASES,
    KDLA_TABLE,
    METHODS,
    apply_overrides,
    default_train_config,
    validate_architecture,
)
from .systems import RECIPE_NAMES, Duffing, Trajectory, generate_dataset, generate_trajectories, recipe

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("kdla")

# training options settable from flags or the [train] table of a config file
TRAIN_KEYS = ("epochs", "lr", "lr_late", "hidden", "d", "activations", "include_constant",
              "batch_size", "k_batch_size", "rcond", "fit_rcond", "svd_method", "tikhonov",
              "tikhonov_gram", "inner_epochs", "early_stop", "patience", "substeps")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _acts(text):
    parts = [p.strip().lower() for p in str(text).split(",") if p.strip()]
    return parts[0] if len(parts) == 1 else parts


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML file with option defaults")
    common.add_argument("--out", type=Path, help="output directory (default under $KDLA_OUTPUT_ROOT)")
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--threads", type=int, help="worker threads for ensemble stages (default 1)")
    common.add_argument("--paper-scale", action="store_true", default=None,
                        help="use published budgets instead of desk-scale ones")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    p = _Parser(prog="kdla", description="Koopman dictionary learning toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", parents=[common], help="simulate a dataset recipe")
    g.add_argument("--system", required=True, help=f"one of: {', '.join(RECIPE_NAMES)}")

    t = sub.add_parser("train", parents=[common], help="train a model on a dataset")
    t.add_argument("--dataset", type=Path, required=True, help="dataset sidecar (.json)")
    t.add_argument("--method", choices=METHODS, default=None)
    t.add_argument("--case", help="architecture preset (default: dataset recipe)")
    t.add_argument("--dict-size", type=int, dest="dict_size", help="lifted dimension D, checked against n + d")
    t.add_argument("--validation", type=Path, nargs="*", help="trajectory CSVs for rollout-based selection")
    t.add_argument("--epochs", type=int)
    t.add_argument("--lr", type=float)
    t.add_argument("--lr-late", type=float, dest="lr_late")
    t.add_argument("--hidden", type=_int_list)
    t.add_argument("--d", type=int)
    t.add_argument("--activations", type=_acts)
    t.add_argument("--include-constant", action="store_true", default=None, dest="include_constant")
    t.add_argument("--batch-size", type=int, dest="batch_size")
    t.add_argument("--k-batch-size", type=int, dest="k_batch_size")
    t.add_argument("--rcond", type=float)
    t.add_argument("--fit-rcond", type=float, dest="fit_rcond")
    t.add_argument("--svd-method", choices=("lapack", "jacobi"), dest="svd_method")
    t.add_argument("--tikhonov", type=float)
    t.add_argument("--tikhonov-gram", choices=("mean", "sum"), dest="tikhonov_gram")
    t.add_argument("--inner-epochs", type=int, dest="inner_epochs")
    t.add_argument("--early-stop", action="store_true", default=None, dest="early_stop")
    t.add_argument("--patience", type=int)
    t.add_argument("--substeps", type=int)

    e = sub.add_parser("evolve", parents=[common], help="roll a trained model forward")
    e.add_argument("--model", type=Path, required=True)
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--x0", type=_float_list, help="initial state, comma separated")
    src.add_argument("--x0-file", type=Path, dest="x0_file", help="trajectory CSV; its first sample is used")
    e.add_argument("--steps", type=int, required=True)
    e.add_argument("--mode", choices=("oo", "so"), default=None)
    e.add_argument("--m", type=_int_list, help="re-lift interval(s) for mode so, e.g. 1,5,15")

    v = sub.add_parser("evaluate", parents=[common], help="compute metrics for predicted trajectories")
    v.add_argument("--truth", type=Path, nargs="*", default=[])
    v.add_argument("--pred", type=Path, nargs="*", default=[])
    v.add_argument("--metrics", type=lambda s: [m.strip() for m in s.split(",") if m.strip()],
                   help="comma list of tracking, energy, power, basin")
    v.add_argument("--model", type=Path, help="model for the basin metric")
    v.add_argument("--grid", type=int, default=None, help="basin grid points per axis (default 20)")
    v.add_argument("--probe", type=int, default=None, help="single component for the power spectrum")

    s = sub.add_parser("spectrum", parents=[common], help="eigenvalues of a Koopman model")
    s.add_argument("--model", type=Path, required=True)
    s.add_argument("--tol", type=float, default=None)

    r = sub.add_parser("reproduce", parents=[common], help="run a full benchmark case")
    r.add_argument("case", help=f"one of: {', '.join(CASES)}")
    return p


# --------------------------------------------------------------------------
# configuration


def _load_toml(path: Path) -> dict:
    try:
        import tomllib as toml  # Python 3.11+
    except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
        import tomli as toml
    try:
        with open(path, "rb") as fh:
            return toml.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except toml.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def resolve(args: argparse.Namespace) -> dict:
    """Defaults, then the TOML file, then explicit flags."""
    cfg = {"seed": 0, "threads": 1, "paper_scale": False}
    train: dict = {}
    if args.config is not None:
        data = _load_toml(args.config)
        train.update(data.pop("train", {}))
        cfg.update(data)
    for key, val in vars(args).items():
        if key in ("config", "verbose", "command") or val is None:
            continue
        if key in TRAIN_KEYS:
            train[key] = val
        else:
            cfg[key] = val
    cfg["train"] = train
    cfg["command"] = args.command
    if int(cfg["threads"]) < 1:
        raise ConfigError("--threads must be at least 1")
    return cfg


def _out_dir(cfg, *default_parts) -> Path:
    out = cfg.get("out")
    return Path(out) if out else output_root().joinpath(*default_parts)


def _echo(out: Path, cfg: dict):
    write_json(out / "config.json", cfg)


def load_model(path: Path):
    d = read_json(path)
    version = d.get("version")
    if version == MODEL_VERSION:
        return KoopmanModel.from_dict(d)
    if version == NODE_VERSION:
        return NodeModel.from_dict(d)
    raise ConfigError(f"{path}: unknown model version {version!r}")


# --------------------------------------------------------------------------
# commands


def cmd_generate(cfg) -> int:
    name = cfg["system"]
    if name not in RECIPE_NAMES:
        raise ConfigError(f"unknown system {name!r}; choose from {', '.join(RECIPE_NAMES)}")
    rec = recipe(name, paper_scale=bool(cfg["paper_scale"]), seed=int(cfg["seed"]))
    out = _out_dir(cfg, name, "data")
    trajs = generate_trajectories(rec, workers=int(cfg["threads"]))
    ds = generate_dataset(rec, trajs=trajs)
    for i, tr in enumerate(trajs):
        write_trajectory(out / "trajectories" / f"traj_{i:04d}.csv", tr)
    write_dataset(out / "dataset", ds)
    _echo(out, cfg)
    print(f"wrote {ds.M} pairs (n={ds.n}) from {len(trajs)} trajectories to {out}")
    return EXIT_OK


def _case_for(cfg, ds) -> str:
    case = cfg.get("case") or ds.provenance.get("recipe")
    if case not in KDLA_TABLE:
        raise ConfigError(f"cannot pick an architecture preset: case {case!r}; pass --case")
    return case


def cmd_train(cfg) -> int:
    ds = read_dataset(cfg["dataset"])
    case = _case_for(cfg, ds)
    method = cfg.get("method") or "kdla"
    tcfg = default_train_config(case, method, bool(cfg["paper_scale"]), int(cfg["seed"]))
    overrides = dict(cfg["train"])
    if method != "node":
        overrides.pop("substeps", None)
    tcfg = apply_overrides(tcfg, overrides)
    D = validate_architecture(ds.n, tcfg, cfg.get("dict_size"))
    if method == "kdla":
        M_k = ds.M if tcfg.k_batch_size is None else min(tcfg.k_batch_size, ds.M)
        if M_k <= D:
            raise ConfigError(f"KDLA needs more snapshot pairs than observables: M={M_k}, D={D}")
    out = _out_dir(cfg, case, method)
    _echo(out, {**cfg, "resolved_train": tcfg.as_dict()})
    if method == "kdla":
        val = [read_trajectory(p) for p in cfg.get("validation") or []] or None
        model = train_kdla(ds, tcfg, validation=val)
    elif method == "kdl-alternating":
        model = train_kdl_alternating(ds, tcfg)
    else:
        model = train_node(ds, tcfg)
    model.meta["system"] = ds.provenance.get("system")
    model.meta["case"] = case
    model.save(out / "model.json")
    curve = np.asarray(model.meta.get("loss_curve", []), dtype=float)
    write_csv(out / "loss_curve.csv", ["epoch", "loss"], np.column_stack([np.arange(curve.size), curve]))
    write_json(out / "metrics.json", {"best_loss": model.meta.get("best_loss", curve.min() if curve.size else None),
                                      "final_loss": float(curve[-1]) if curve.size else None,
                                      "epochs": int(curve.size), "method": method})
    print(f"trained {method} on {case}: final loss {curve[-1]:.6g}; model at {out / 'model.json'}")
    return EXIT_OK


def cmd_evolve(cfg) -> int:
    model = load_model(cfg["model"])
    if cfg.get("x0_file"):
        x0 = read_trajectory(cfg["x0_file"]).states[:, 0]
    else:
        x0 = np.asarray(cfg["x0"], dtype=float)
    if x0.shape != (model.n,):
        raise DimensionError(f"x0 has {x0.size} entries, the model state has {model.n}")
    Nt = int(cfg["steps"])
    if Nt < 0:
        raise ConfigError("--steps must be non-negative")
    mode = cfg.get("mode") or "oo"
    out = _out_dir(cfg, "evolve")
    _echo(out, cfg)
    if isinstance(model, NodeModel):
        runs = [("node", "oo", 1)]
    elif mode == "oo":
        runs = [("oo", "oo", 1)]
    else:
        runs = [(f"so_m{m}", "so", int(m)) for m in (cfg.get("m") or [1])]
    for label, md, m in runs:
        if m < 1:
            raise ConfigError("m must be at least 1")
        states = rollout(model, x0, Nt, md, m)[0]
        tr = Trajectory(states, model.dt, meta={"mode": md, "m": m})
        write_trajectory(out / f"trajectory_{label}.csv", tr)
        if not np.all(np.isfinite(states)):
            log.warning("%s rollout became non-finite", label)
    print(f"wrote {len(runs)} trajectory file(s) to {out}")
    return EXIT_OK


def cmd_evaluate(cfg) -> int:
    metrics = cfg.get("metrics") or ["tracking"]
    unknown = sorted(set(metrics) - {"tracking", "energy", "power", "basin"})
    if unknown:
        raise ConfigError(f"unknown metric(s): {', '.join(unknown)}")
    truth = [read_trajectory(p) for p in cfg.get("truth") or []]
    pred = [read_trajectory(p) for p in cfg.get("pred") or []]
    out = _out_dir(cfg, "evaluate")
    _echo(out, cfg)
    summary: dict = {}
    dts = {round(tr.dt, 12) for tr in truth + pred}
    if len(dts) > 1:
        raise ConfigError(f"trajectories have different sampling intervals: {sorted(dts)}")
    if "tracking" in metrics:
        if not truth or len(truth) != len(pred):
            raise ConfigError("tracking needs matching --truth and --pred lists")
        rep = tracking_error(truth, pred)
        write_csv(out / "tracking_error.csv", ["t", "error", "raw"],
                  np.column_stack([rep.times, rep.error, rep.raw]))
        summary["tracking"] = {"normalizer": rep.normalizer, "ensemble": rep.size,
                               "final": float(rep.error[-1]), "max": float(np.max(rep.error))}
    if "energy" in metrics:
        for tag, group in (("truth", truth), ("pred", pred)):
            for i, tr in enumerate(group):
                write_csv(out / f"energy_{tag}_{i:03d}.csv", ["t", "energy"],
                          np.column_stack([tr.times, energy(tr)]))
    if "power" in metrics:
        dom = {}
        for tag, group in (("truth", truth), ("pred", pred)):
            for i, tr in enumerate(group):
                rep = power_spectrum(tr, probe=cfg.get("probe"))
                write_csv(out / f"power_{tag}_{i:03d}.csv", ["bin", "frequency", "power"],
                          np.column_stack([rep.bins, rep.frequencies, rep.power]))
                dom[f"{tag}_{i:03d}"] = rep.dominant_bin
        summary["power_dominant_bin"] = dom
    if "basin" in metrics:
        if cfg.get("model") is None:
            raise ConfigError("the basin metric needs --model")
        model = load_model(cfg["model"])
        system = (model.meta.get("system") or {}).get("name") if isinstance(model.meta.get("system"), dict) else None
        if system != "duffing" or model.n != 2:
            raise ConfigError("basin maps are only defined for models trained on the Duffing system")
        ics = basin_grid(int(cfg.get("grid") or 20))
        mode = "oo" if isinstance(model, NodeModel) else "so"
        truth_map = basin_map(Duffing(), ics)
        model_map = basin_map(model, ics, mode=mode, m=1)
        write_csv(out / "basin.csv", ["x1_0", "x2_0", "final_x1_truth", "label_truth", "final_x1_model", "label_model"],
                  np.column_stack([ics[0], ics[1], truth_map.final_x1, truth_map.labels,
                                   model_map.final_x1, model_map.labels]))
        summary["basin_agreement"] = model_map.agreement(truth_map)
    write_json(out / "summary.json", summary)
    print(f"wrote {', '.join(metrics)} report(s) to {out}")
    return EXIT_OK


def cmd_spectrum(cfg) -> int:
    model = load_model(cfg["model"])
    if not isinstance(model, KoopmanModel):
        raise ConfigError("spectra are defined for Koopman models only")
    rep = spectrum_report(model, tol=float(cfg.get("tol") or 1e-6))
    out = _out_dir(cfg, "spectrum")
    _echo(out, cfg)
    lam = rep.eigenvalues
    write_csv(out / "eigenvalues.csv", ["real", "imag", "modulus", "unit_circle_distance"],
              np.column_stack([lam.real, lam.imag, rep.moduli, rep.distances]))
    write_json(out / "summary.json", {"D": int(lam.size), "max_modulus": rep.max_modulus,
                                      "n_outside_unit_circle": rep.n_outside, "tol": rep.tol})
    print(f"max |lambda| = {rep.max_modulus:.6f}; {rep.n_outside} outside the unit circle")
    return EXIT_OK


def cmd_reproduce(cfg) -> int:
    case = cfg["case"]
    if case not in CASE_RUNNERS:
        raise ConfigError(f"unknown case {case!r}; valid cases: {', '.join(CASE_RUNNERS)}")
    out = _out_dir(cfg, case)
    train = dict(cfg.get("train") or {})
    overrides = {m: dict(train.get(m, {})) for m in METHODS if isinstance(train.get(m), dict)}
    ctx = RunContext(out, int(cfg["seed"]), bool(cfg["paper_scale"]), int(cfg["threads"]), overrides)
    _echo(out, cfg)
    summary = reproduce(case, ctx)
    print(f"{case}: outputs in {out}")
    for key in ("max_error", "tracking_error_t2", "basin_agreement", "dominant_bin"):
        if key in summary:
            print(f"  {key}: {summary[key]}")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "evolve": cmd_evolve,
    "evaluate": cmd_evaluate,
    "spectrum": cmd_spectrum,
    "reproduce": cmd_reproduce,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except (NumericalError, TrainingError, FloatingPointError) as exc:
        print(f"kdla: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, DimensionError, OSError, KeyError) as exc:
        print(f"kdla: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KdlaError as exc:
        print(f"kdla: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
