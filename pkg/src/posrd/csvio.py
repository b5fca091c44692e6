"""CSV persistence for trajectories, split-scheme snapshots and initial data.

Floats are written with ``repr``, the shortest decimal string that reads
back to the same double, so a write/read cycle is lossless.
"""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .errors import DimensionError
from .picard import TimeGrid, Trajectory
from .splitting import Grid1D, SplitState


def _fmt(x) -> str:
    return repr(float(x))


def write_trajectory(path, traj: Trajectory) -> None:
    m = traj.dim
    lines = [",".join(["k", "t"] + [f"u_{i + 1}" for i in range(m)])]
    for k, (t, row) in enumerate(zip(traj.times, traj.states)):
        lines.append(",".join([str(k), _fmt(t)] + [_fmt(x) for x in row]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trajectory(path) -> Trajectory:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header[:2] != ["k", "t"]:
        raise ValueError(f"{path}: not a trajectory CSV (header {header})")
    times = np.array([float(r[1]) for r in body])
    states = np.array([[float(x) for x in r[2:]] for r in body])
    dt = times[1] - times[0] if len(times) > 1 else 1.0
    traj = Trajectory(TimeGrid(dt, len(body)), states)
    return traj


def write_snapshots(path, snapshots: Sequence[SplitState], grid: Grid1D) -> None:
    x = [_fmt(xj) for xj in grid.x]
    lines = ["k,t,j,x,u,v"]
    for s in snapshots:
        k, t = str(s.k), _fmt(s.t)
        for j, (xj, uj, vj) in enumerate(zip(x, s.u.tolist(), s.v.tolist())):
            lines.append(f"{k},{t},{j},{xj},{uj!r},{vj!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_snapshots(path) -> List[SplitState]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["k", "t", "j", "x", "u", "v"]:
            raise ValueError(f"{path}: not a snapshot CSV (header {header})")
        groups = {}
        order = []
        for k, t, j, _x, u, v in reader:
            key = int(k)
            if key not in groups:
                groups[key] = (float(t), [], [])
                order.append(key)
            groups[key][1].append(float(u))
            groups[key][2].append(float(v))
    return [SplitState(np.array(groups[k][1]), np.array(groups[k][2]), k, groups[k][0]) for k in order]


def read_initial_fields(path, grid: Grid1D) -> Tuple[np.ndarray, np.ndarray]:
    """Per-node initial data with columns ``j, u, v``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"j", "u", "v"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: initial data needs columns j, u, v")
        rows = sorted(((int(r["j"]), float(r["u"]), float(r["v"])) for r in reader))
    if [r[0] for r in rows] != list(range(grid.n_nodes)):
        raise DimensionError(f"{path}: expected nodes 0..{grid.n_nodes - 1}")
    u = np.array([r[1] for r in rows])
    v = np.array([r[2] for r in rows])
    return u, v


def write_table(path, rows: Iterable[Tuple[str, float]]) -> None:
    lines = ["quantity,value"] + [f"{name},{_fmt(val)}" for name, val in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
