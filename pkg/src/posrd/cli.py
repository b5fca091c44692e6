"""Command line entry point: ``posrd <mode> [--preset NAME] [--config PATH] [--set KEY=VALUE ...]``."""
from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

import numpy as np

from . import csvio
from .analysis import Region, check_region, ubar
from .config import MODES, PRESETS, RunConfig, initial_fields, load_config
from .errors import ConfigError, PosrdError
from .model import bz_reaction_model, max_norm
from .picard import existence_horizon, solve_picard
from .semi_implicit import DEConfig, solve_de
from .splitting import run_splitting, stability_limit

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_REGION = 3

log = logging.getLogger("posrd")


def _range(name: str, values) -> str:
    values = np.asarray(values)
    return f"{name}=[{float(values.min())!r}, {float(values.max())!r}]"


def _run_ode_de(cfg: RunConfig, out) -> int:
    model = bz_reaction_model(cfg.params)
    traj = solve_de(model, cfg.initial_state, DEConfig(cfg.dt, cfg.n_steps))
    if cfg.output:
        csvio.write_trajectory(cfg.output, traj)
    s = traj.states
    print(f"mode=ode_de steps={cfg.n_steps} dt={cfg.dt!r} {_range('u', s[:, 0])} {_range('v', s[:, 1])}", file=out)
    return EXIT_OK


def _run_ode_picard(cfg: RunConfig, out) -> int:
    model = bz_reaction_model(cfg.params)
    a = cfg.initial_state
    horizon = cfg.horizon
    if horizon is None:
        if max_norm(a) == 0:
            horizon = 1.0
        else:
            horizon = existence_horizon(model, a, cfg.samples_per_axis).T0
    dt_fine = cfg.dt_fine if cfg.dt_fine is not None else horizon / 100
    traj, diag = solve_picard(
        model, a, horizon, dt_fine, tol=cfg.tol, max_iter=cfg.max_iter, samples_per_axis=cfg.samples_per_axis
    )
    if cfg.output:
        csvio.write_trajectory(cfg.output, traj)
    s = traj.states
    print(
        f"mode=ode_picard iterations={diag.iterations} horizon={horizon!r} "
        f"last_difference={diag.differences[-1]!r} {_range('u', s[:, 0])} {_range('v', s[:, 1])}",
        file=out,
    )
    return EXIT_OK


def _run_pde_split(cfg: RunConfig, out) -> int:
    p = cfg.params
    u0, v0 = initial_fields(cfg)
    region = Region.discrete_bz(p)
    guaranteed = region.contains(u0, v0)
    snaps = run_splitting(p, cfg.grid, u0, v0, cfg.dt, cfg.n_steps, cfg.snapshot_every)
    if cfg.output:
        csvio.write_snapshots(cfg.output, snaps, cfg.grid)
    report = check_region(snaps, region)
    if report.empty:
        verdict = "pass"
    elif guaranteed:
        verdict = "FAIL"
    else:
        verdict = "outside (initial data not in (q,1))"
    u_all = np.concatenate([s.u for s in snaps])
    v_all = np.concatenate([s.v for s in snaps])
    print(
        f"mode=pde_split steps={cfg.n_steps} dt={cfg.dt!r} {_range('u', u_all)} {_range('v', v_all)} region={verdict}",
        file=out,
    )
    if guaranteed and not report.empty:
        log.error("invariant region violated: %s", report.summary())
        return EXIT_REGION
    return EXIT_OK


def _run_analyze(cfg: RunConfig, out) -> int:
    p = cfg.params
    rows = [("h", p.h), ("ubar", ubar(p)), ("stability_limit", stability_limit(p.d, cfg.grid.dx))]
    a = cfg.initial_state
    if max_norm(a) > 0:
        est = existence_horizon(bz_reaction_model(p), a, cfg.samples_per_axis)
        rows += [("M_f", est.M_f), ("M_g", est.M_g), ("T0", est.T0)]
    if cfg.output:
        csvio.write_table(cfg.output, rows)
    print("mode=analyze " + " ".join(f"{k}={v!r}" for k, v in rows), file=out)
    return EXIT_OK


_DISPATCH = {
    "ode_de": _run_ode_de,
    "ode_picard": _run_ode_picard,
    "pde_split": _run_pde_split,
    "analyze": _run_analyze,
}


def run(cfg: RunConfig, out=None) -> int:
    """Run one configured job; returns the process exit status."""
    out = out or sys.stdout
    try:
        return _DISPATCH[cfg.mode](cfg, out)
    except PosrdError as exc:
        log.error("%s failed: %s", cfg.mode, exc)
        return EXIT_SOLVER
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_SOLVER


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posrd", description="Positivity-preserving BZ solvers.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        sp = sub.add_parser(mode, aliases=[mode.replace("_", "-")])
        sp.add_argument("--config", help="INI-style config file")
        sp.add_argument("--preset", choices=sorted(PRESETS))
        sp.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
        sp.add_argument("-o", "--output", help="output CSV path")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    overrides = list(args.overrides)
    if args.output:
        overrides.append(f"run.output={args.output}")
    try:
        cfg = load_config(preset=args.preset, path=args.config, mode=args.mode, overrides=overrides)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
