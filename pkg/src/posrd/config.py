"""Run configuration: INI-style key/value text, presets and initial profiles."""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, Optional, Tuple

import numpy as np

from .errors import ConfigError, PosrdError
from .model import BZParams
from .splitting import BC, Grid1D, cell_average, mesh_ratio, stability_limit

MODES = ("ode_de", "ode_picard", "pde_split", "analyze")
PROFILES = ("constant", "bump", "random", "csv")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise ValueError
    return value


def _int(text: str) -> int:
    return int(text)


def _float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError
    return value


def _str(text: str) -> str:
    return text.strip()


# section -> key -> (converter, expected form)
SCHEMA: Dict[str, Dict[str, Tuple[Callable[[str], object], str]]] = {
    "run": {"mode": (_str, "one of " + ", ".join(MODES)), "output": (_str, "a file path")},
    "model": {
        "epsilon": (_float, "a positive number"),
        "q": (_float, "a number in (0, 1)"),
        "d": (_float, "a nonnegative number"),
        "rho": (_float, "a positive number"),
    },
    "grid": {
        "L": (_float, "a positive number"),
        "J": (_positive_int, "an integer >= 3"),
        "bc": (_str, "'neumann' or 'periodic'"),
    },
    "time": {
        "dt": (_float, "a positive number"),
        "n_steps": (_positive_int, "a positive integer"),
        "snapshot_every": (_positive_int, "a positive integer"),
    },
    "initial": {
        "profile": (_str, "one of " + ", ".join(PROFILES)),
        "u": (_float, "a number"),
        "v": (_float, "a number"),
        "center": (_float, "a number"),
        "width": (_float, "a positive number"),
        "amplitude": (_float, "a number"),
        "seed": (_int, "an integer"),
        "margin": (_float, "a positive number"),
        "path": (_str, "a file path"),
    },
    "picard": {
        "tol": (_float, "a positive number"),
        "max_iter": (_positive_int, "a positive integer"),
        "dt_fine": (_float, "a positive number"),
        "horizon": (_float, "a positive number"),
        "samples_per_axis": (_positive_int, "an integer >= 2"),
    },
}

PRESETS = {
    "bz_paper": """
[model]
epsilon = 0.032
q = 2.0e-4
d = 0.0192
rho = 0.5

[grid]
L = 1.0
J = 100
bc = neumann

[time]
n_steps = 10000
snapshot_every = 100

[initial]
profile = random
seed = 0
margin = 1e-3
u = 0.5
v = 0.5
""",
}


@dataclass(frozen=True)
class RunConfig:
    mode: str
    params: BZParams
    grid: Grid1D
    dt: float
    n_steps: int
    snapshot_every: int = 1
    profile: str = "constant"
    u: float = 0.5
    v: float = 0.5
    center: float = 0.5
    width: float = 0.1
    amplitude: float = 0.4
    seed: int = 0
    margin: float = 1e-3
    init_path: Optional[str] = None
    tol: float = 1e-10
    max_iter: int = 200
    dt_fine: Optional[float] = None
    horizon: Optional[float] = None
    samples_per_axis: int = 101
    output: Optional[str] = None

    @property
    def initial_state(self) -> np.ndarray:
        return np.array([self.u, self.v])


def _new_parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(strict=True, interpolation=None, default_section="__defaults__")
    cp.optionxform = str  # keys are case sensitive (L, J)
    return cp


def _read(cp: configparser.ConfigParser, text: str, source: str) -> None:
    try:
        cp.read_string(text, source=source)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"{source}: duplicate key '{exc.section}.{exc.option}'") from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"{source}: duplicate section [{exc.section}]") from None
    except configparser.Error as exc:
        raise ConfigError(f"{source}: malformed config: {exc}") from None


def _apply_override(cp: configparser.ConfigParser, item: str) -> None:
    if "=" not in item:
        raise ConfigError(f"override {item!r} must look like key=value or section.key=value")
    key, value = (part.strip() for part in item.split("=", 1))
    if "." in key:
        section, key = key.split(".", 1)
    else:
        owners = [s for s, keys in SCHEMA.items() if key in keys]
        if len(owners) != 1:
            raise ConfigError(f"unknown key {key!r} in override" if not owners else f"ambiguous key {key!r}")
        section = owners[0]
    if section not in SCHEMA or key not in SCHEMA[section]:
        raise ConfigError(f"unknown key '{section}.{key}' in override")
    if not cp.has_section(section):
        cp.add_section(section)
    cp.set(section, key, value)


def _collect(cp: configparser.ConfigParser) -> Dict[str, object]:
    values: Dict[str, object] = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]; expected one of {', '.join(SCHEMA)}")
        for key, raw in cp.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key '{section}.{key}'")
            convert, expected = SCHEMA[section][key]
            try:
                values[f"{section}.{key}"] = convert(raw)
            except ValueError:
                raise ConfigError(f"'{section}.{key}' = {raw!r}: expected {expected}") from None
    return values


def _build(values: Dict[str, object], mode: Optional[str]) -> RunConfig:
    mode = mode or values.get("run.mode")
    if mode is None:
        raise ConfigError("no mode given; set run.mode or pick a subcommand")
    mode = str(mode).replace("-", "_")
    if mode not in MODES:
        raise ConfigError(f"'run.mode' = {mode!r}: expected one of {', '.join(MODES)}")

    def get(key, default=None):
        return values.get(key, default)

    try:
        params = BZParams(
            epsilon=get("model.epsilon", 0.032),
            q=get("model.q", 2.0e-4),
            d=get("model.d", 0.0192),
            rho=get("model.rho", 0.5),
        )
    except ValueError as exc:
        raise ConfigError(f"[model]: {exc}") from None
    try:
        grid = Grid1D(get("grid.L", 1.0), get("grid.J", 100), BC.parse(get("grid.bc", "neumann")))
    except (ValueError, PosrdError) as exc:
        raise ConfigError(f"[grid]: {exc}") from None

    limit = stability_limit(params.d, grid.dx)
    dt = get("time.dt")
    if dt is None:
        dt = 0.99 * limit if mode == "pde_split" else 1e-3
    if not dt > 0:
        raise ConfigError(f"'time.dt' = {dt!r}: expected a positive number")
    if mode == "pde_split":
        ratio = dt / grid.dx**2
        if max(mesh_ratio(1.0, dt, grid.dx), mesh_ratio(params.d, dt, grid.dx)) > 0.5:
            raise ConfigError(
                f"'time.dt' = {dt!r} violates dt <= dx^2/max{{2,2d}} = {limit!r}: "
                f"dt/dx^2 = {ratio!r} > 1/max{{2,2d}} = {1 / max(2.0, 2.0 * params.d)!r}"
            )

    profile = get("initial.profile", "constant")
    if profile not in PROFILES:
        raise ConfigError(f"'initial.profile' = {profile!r}: expected one of {', '.join(PROFILES)}")
    if mode != "pde_split" and profile != "constant":
        # the ODE modes and analyze only use the constant pair (u, v)
        profile = "constant"
    if profile == "csv" and not get("initial.path"):
        raise ConfigError("'initial.path' is required for profile = csv")
    margin = get("initial.margin", 1e-3)
    if not 0 < margin < (1 - params.q) / 2:
        raise ConfigError(f"'initial.margin' = {margin!r}: expected a number in (0, (1-q)/2)")
    width = get("initial.width", 0.1)
    if not width > 0:
        raise ConfigError(f"'initial.width' = {width!r}: expected a positive number")
    u, v = get("initial.u", 0.5), get("initial.v", 0.5)
    if mode in ("ode_de", "ode_picard") and (u < 0 or v < 0):
        raise ConfigError(f"initial state ({u!r}, {v!r}) must be nonnegative")

    cfg = RunConfig(
        mode=mode,
        params=params,
        grid=grid,
        dt=dt,
        n_steps=get("time.n_steps", 100),
        snapshot_every=get("time.snapshot_every", 1),
        profile=profile,
        u=u,
        v=v,
        center=get("initial.center", 0.5 * grid.L),
        width=width,
        amplitude=get("initial.amplitude", 0.4),
        seed=get("initial.seed", 0),
        margin=margin,
        init_path=get("initial.path"),
        tol=get("picard.tol", 1e-10),
        max_iter=get("picard.max_iter", 200),
        dt_fine=get("picard.dt_fine"),
        horizon=get("picard.horizon"),
        samples_per_axis=get("picard.samples_per_axis", 101),
        output=get("run.output"),
    )
    for key in ("picard.tol", "picard.dt_fine", "picard.horizon"):
        if key in values and not values[key] > 0:
            raise ConfigError(f"'{key}' = {values[key]!r}: expected a positive number")
    if cfg.samples_per_axis < 2:
        raise ConfigError("'picard.samples_per_axis' must be at least 2")
    return cfg


def parse_config(text: str, mode: Optional[str] = None, overrides: Iterable[str] = ()) -> RunConfig:
    """Parse and validate a config document.

    ``mode`` takes precedence over ``run.mode``.  Overrides are applied after
    the text, as ``key=value`` or ``section.key=value``.
    """
    return load_config(texts=[("<config>", text)], mode=mode, overrides=overrides)


def load_config(
    preset: Optional[str] = None,
    path=None,
    texts: Iterable[Tuple[str, str]] = (),
    mode: Optional[str] = None,
    overrides: Iterable[str] = (),
) -> RunConfig:
    """Layer a preset, a config file, extra texts and overrides, in that order."""
    cp = _new_parser()
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; available: {', '.join(PRESETS)}")
        _read(cp, PRESETS[preset], f"<preset {preset}>")
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        _read(cp, text, str(path))
    for source, text in texts:
        _read(cp, text, source)
    for item in overrides:
        _apply_override(cp, item)
    return _build(_collect(cp), mode)


def initial_fields(cfg: RunConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Nodal initial data for the split scheme."""
    grid, q = cfg.grid, cfg.params.q
    lo, hi = q + cfg.margin, 1.0 - cfg.margin
    if cfg.profile == "constant":
        n = grid.n_nodes
        return np.full(n, cfg.u), np.full(n, cfg.v)
    if cfg.profile == "random":
        rng = np.random.default_rng(cfg.seed)
        u = rng.uniform(lo, hi, grid.n_nodes)
        v = rng.uniform(lo, hi, grid.n_nodes)
        return u, v
    if cfg.profile == "bump":

        def bump(base):
            return lambda x: base + cfg.amplitude * np.exp(-(((x - cfg.center) / cfg.width) ** 2))

        u = np.clip(cell_average(bump(cfg.u), grid), lo, hi)
        v = np.clip(cell_average(bump(cfg.v), grid), lo, hi)
        return u, v
    from .csvio import read_initial_fields

    return read_initial_fields(cfg.init_path, grid)
