"""Plain-text persistence: CSV tables with 17 significant digits and JSON sidecars.

Every writer is deterministic, so re-running a command with the same inputs
produces byte-identical files.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

from .errors import ConfigError
from .systems import SnapshotDataset, Trajectory, system_from_dict, system_to_dict

DATA_VERSION = "kdla-data/1"


class ParseError(ConfigError):
    """Malformed input file; the message names the file and line."""


def fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(path, header: Sequence[str], rows) -> Path:
    """Write a header line and one line per row of a 2-D array."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.size and rows.shape[1] != len(header):
        raise ConfigError(f"{path}: {len(header)} header fields for {rows.shape[1]} columns")
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows if rows.size)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_csv(path) -> Tuple[List[str], np.ndarray]:
    path = Path(path)
    try:
        with open(path) as fh:
            text = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not text:
        raise ParseError(f"{path}: line 1: empty file, expected a header")
    header = [h.strip() for h in text[0].split(",")]
    rows = []
    for lineno, line in enumerate(text[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise ParseError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise ParseError(f"{path}: line {lineno}: {exc}") from exc
    return header, np.asarray(rows, dtype=float).reshape(len(rows), len(header))


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        json.dump(_plain(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_json(path) -> dict:
    path = Path(path)
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, os.PathLike):
        return os.fspath(obj)
    return obj


def state_header(n: int) -> List[str]:
    return [f"x{i}" for i in range(n)]


def write_trajectory(path, traj: Trajectory) -> Path:
    """``t,x0..`` CSV plus a ``.json`` sidecar next to it."""
    path = Path(path)
    rows = np.column_stack([traj.times, traj.states.T])
    write_csv(path, ["t", *state_header(traj.n)], rows)
    side = {
        "dt": traj.dt,
        "t0": traj.t0,
        "seed": traj.seed,
        "system": system_to_dict(traj.system) if traj.system is not None else None,
        "meta": traj.meta,
    }
    write_json(path.with_suffix(".json"), side)
    return path


def read_trajectory(path) -> Trajectory:
    path = Path(path)
    header, rows = read_csv(path)
    if not header or header[0] != "t":
        raise ParseError(f"{path}: line 1: trajectory header must start with 't'")
    side_path = path.with_suffix(".json")
    side = read_json(side_path) if side_path.exists() else {}
    if rows.shape[0] < 1:
        raise ParseError(f"{path}: no samples")
    t = rows[:, 0]
    dt = side.get("dt", float(t[1] - t[0]) if t.size > 1 else 1.0)
    system = system_from_dict(side["system"]) if side.get("system") else None
    return Trajectory(rows[:, 1:].T.copy(), float(dt), float(side.get("t0", t[0])), system,
                      side.get("seed"), dict(side.get("meta", {})))


def write_dataset(stem, ds: SnapshotDataset) -> Path:
    """``<stem>_X_t.csv``, ``<stem>_X_tdt.csv`` (one row per pair) and ``<stem>.json``."""
    stem = Path(stem)
    hdr = state_header(ds.n)
    write_csv(f"{stem}_X_t.csv", hdr, ds.X_t.T)
    write_csv(f"{stem}_X_tdt.csv", hdr, ds.X_tdt.T)
    side = {"version": DATA_VERSION, "n": ds.n, "M": ds.M, "dt": ds.dt,
            "provenance": ds.provenance, "X_t": f"{stem.name}_X_t.csv",
            "X_tdt": f"{stem.name}_X_tdt.csv"}
    return write_json(f"{stem}.json", side)


def read_dataset(path) -> SnapshotDataset:
    """Load from the ``.json`` sidecar (or the stem without suffix)."""
    path = Path(path)
    if path.suffix != ".json":
        path = Path(str(path) + ".json")
    side = read_json(path)
    if side.get("version") != DATA_VERSION:
        raise ParseError(f"{path}: unsupported dataset version {side.get('version')!r}")
    base = path.parent
    _, X = read_csv(base / side["X_t"])
    _, Y = read_csv(base / side["X_tdt"])
    if X.shape != (int(side["M"]), int(side["n"])) or Y.shape != X.shape:
        raise ParseError(f"{path}: matrix shapes do not match n={side['n']}, M={side['M']}")
    return SnapshotDataset(X.T.copy(), Y.T.copy(), float(side["dt"]), dict(side.get("provenance", {})))


def output_root(default="runs") -> Path:
    """Output root from ``KDLA_OUTPUT_ROOT`` or ``default``."""
    return Path(os.environ.get("KDLA_OUTPUT_ROOT", default))


__all__ = [
    "DATA_VERSION",
    "ParseError",
    "output_root",
    "read_csv",
    "read_dataset",
    "read_json",
    "read_trajectory",
    "write_csv",
    "write_dataset",
    "write_json",
    "write_trajectory",
]
