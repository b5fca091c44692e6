"""Positivity-preserving mixed forward/backward Euler steps.

The decay term is taken at the new level and everything else at the old
one, so each step is the quotient ``(u + g dt) / (1 + f dt)``.  With
``f, g >= 0`` and ``u >= 0`` this is nonnegative for every ``dt > 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .model import ModelSpec, as_state
from .picard import TimeGrid, Trajectory


@dataclass(frozen=True)
class DEConfig:
    dt: float
    n_steps: int

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise PreconditionError(f"dt must be positive and finite, got {self.dt!r}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise PreconditionError(f"n_steps must be a positive integer, got {self.n_steps!r}")


def quotient_update(s: np.ndarray, f: np.ndarray, g: np.ndarray, dt: float) -> np.ndarray:
    return (s + g * dt) / (1.0 + f * dt)


def de_step(model: ModelSpec, u, dt: float) -> np.ndarray:
    u = as_state(u, model.dim)
    if not (np.isfinite(dt) and dt > 0):
        raise PreconditionError(f"dt must be positive and finite, got {dt!r}")
    if np.any(~(u >= 0)):
        raise PreconditionError(f"de_step needs a nonnegative state, got {u.tolist()}")
    f = model.f(u)
    g = model.g(u)
    if np.any(~(f >= 0)) or np.any(~(g >= 0)):
        raise DomainError(f"model returned negative rates f={f.tolist()}, g={g.tolist()}")
    return quotient_update(u, f, g, dt)


def solve_de(model: ModelSpec, a, cfg: DEConfig) -> Trajectory:
    """March ``de_step`` ``cfg.n_steps`` times from ``a`` on nodes ``k * dt``."""
    u = as_state(a, model.dim)
    states = np.empty((cfg.n_steps + 1, model.dim))
    states[0] = u
    for k in range(cfg.n_steps):
        u = de_step(model, u, cfg.dt)
        states[k + 1] = u
    return Trajectory(TimeGrid(cfg.dt, cfg.n_steps + 1), states)
