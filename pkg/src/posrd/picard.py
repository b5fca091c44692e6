"""Successive approximation for ``u' = -F(u) u + g(u)``.

Each iterate solves the linear problem with coefficients frozen at the
previous iterate.  Because ``F`` is diagonal, the linear problem is solved
componentwise with an integrating factor; the exponent and the Duhamel
integral use the trapezoidal rule on a uniform grid.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .errors import DimensionError, NonConvergenceError, PreconditionError
from .model import ModelSpec, as_state, max_norm

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimeGrid:
    """Nodes ``t_r = r * dt_fine`` for ``r = 0, ..., n_nodes - 1``."""

    dt_fine: float
    n_nodes: int
    t0: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.dt_fine) and self.dt_fine > 0):
            raise PreconditionError(f"dt_fine must be positive, got {self.dt_fine!r}")
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 2:
            raise PreconditionError(f"n_nodes must be an integer >= 2, got {self.n_nodes!r}")
        if self.t0 != 0.0:
            raise PreconditionError("time grids start at t = 0")

    @classmethod
    def covering(cls, horizon: float, dt_fine: float) -> "TimeGrid":
        """Uniform grid on ``[0, horizon]`` with spacing at most ``dt_fine``."""
        n = max(1, math.ceil(horizon / dt_fine - 1e-9))
        return cls(horizon / n, n + 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n_nodes) * self.dt_fine

    @property
    def horizon(self) -> float:
        return (self.n_nodes - 1) * self.dt_fine


@dataclass(frozen=True)
class Trajectory:
    grid: TimeGrid
    states: np.ndarray  # (n_nodes, m)

    def __post_init__(self):
        states = np.array(self.states, dtype=float)
        if states.ndim != 2 or states.shape[0] != self.grid.n_nodes:
            raise DimensionError(
                f"trajectory needs {self.grid.n_nodes} states, got array of shape {states.shape}"
            )
        states.flags.writeable = False
        object.__setattr__(self, "states", states)

    @property
    def times(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @classmethod
    def constant(cls, grid: TimeGrid, a) -> "Trajectory":
        a = as_state(a)
        return cls(grid, np.tile(a, (grid.n_nodes, 1)))

    def sup_distance(self, other: "Trajectory") -> float:
        if self.states.shape != other.states.shape:
            raise DimensionError("trajectories live on different grids")
        return float(np.max(np.abs(self.states - other.states)))


@dataclass(frozen=True)
class ExistenceEstimate:
    M_f: float
    M_g: float
    T0: float
    ball_radius: float


def _safe_ratio(num: float, den: float) -> float:
    return math.inf if den == 0 else num / den


def existence_horizon(model: ModelSpec, a, samples_per_axis: int = 101) -> ExistenceEstimate:
    """Lattice estimate of ``T0 = min(1/(3 M_f), |a|/(3 M_g))``.

    The suprema of ``|F(v)|`` and ``|g(v)|`` over ``|v| <= 2|a|`` are
    replaced by maxima over a uniform lattice on the nonnegative box
    ``[0, 2|a|]^m``; iterates never leave the nonnegative orthant.
    """
    a = as_state(a, model.dim)
    if np.any(a < 0):
        raise PreconditionError("initial data must be componentwise nonnegative")
    norm_a = max_norm(a)
    if norm_a == 0:
        raise PreconditionError("existence horizon needs a nonzero initial state")
    if samples_per_axis < 2:
        raise PreconditionError("samples_per_axis must be at least 2")
    radius = 2.0 * norm_a
    axis = np.linspace(0.0, radius, samples_per_axis)
    mesh = np.meshgrid(*([axis] * model.dim), indexing="ij")
    lattice = np.stack([m.ravel() for m in mesh])
    M_f = float(np.max(np.abs(model.f(lattice))))
    M_g = float(np.max(np.abs(model.g(lattice))))
    T0 = min(_safe_ratio(1.0, 3.0 * M_f), _safe_ratio(norm_a, 3.0 * M_g))
    return ExistenceEstimate(M_f=M_f, M_g=M_g, T0=T0, ball_radius=radius)


def picard_step(model: ModelSpec, prev: Trajectory, a) -> Trajectory:
    """Solve the frozen-coefficient linear system exactly up to quadrature.

    With ``Phi_i(t) = int_0^t f_i(prev(s)) ds`` the next iterate is
    ``exp(-Phi_i(t)) a_i + int_0^t exp(-(Phi_i(t) - Phi_i(s))) g_i(prev(s)) ds``.
    Marching node to node keeps every term a product of nonnegative factors.
    """
    a = as_state(a, model.dim)
    if prev.dim != model.dim:
        raise DimensionError(f"trajectory has {prev.dim} components, model expects {model.dim}")
    if np.any(a < 0):
        raise PreconditionError("initial data must be componentwise nonnegative")
    dt = prev.grid.dt_fine
    f = model.f(prev.states.T).T
    g = model.g(prev.states.T).T
    decay = np.exp(-0.5 * dt * (f[:-1] + f[1:]))
    gain = 0.5 * dt * (decay * g[:-1] + g[1:])

    out = np.empty_like(prev.states)
    out[0] = a
    u = a.copy()
    for r in range(prev.grid.n_nodes - 1):
        u = decay[r] * u + gain[r]
        out[r + 1] = u
    return Trajectory(prev.grid, out)


@dataclass
class PicardDiagnostics:
    differences: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    estimate: ExistenceEstimate | None = None


def solve_picard(
    model: ModelSpec,
    a,
    horizon: float,
    dt_fine: float,
    tol: float = 1e-10,
    max_iter: int = 200,
    samples_per_axis: int = 101,
    unsafe: bool = False,
):
    """Iterate ``picard_step`` from the constant trajectory ``a``.

    Stops once consecutive iterates differ by less than ``tol`` in the sup
    norm over nodes.  ``horizon`` may not exceed the lattice estimate of
    ``T0`` unless ``unsafe`` is set.  Returns ``(trajectory, diagnostics)``.
    """
    a = as_state(a, model.dim)
    if np.any(a < 0):
        raise PreconditionError("initial data must be componentwise nonnegative")
    if not (horizon > 0 and dt_fine > 0 and tol > 0 and max_iter >= 1):
        raise PreconditionError("horizon, dt_fine, tol and max_iter must be positive")

    estimate = None
    if max_norm(a) > 0:
        estimate = existence_horizon(model, a, samples_per_axis)
        if horizon > estimate.T0 and not unsafe:
            raise PreconditionError(
                f"horizon {horizon!r} exceeds the existence horizon T0 = {estimate.T0!r}"
            )

    grid = TimeGrid.covering(horizon, dt_fine)
    current = Trajectory.constant(grid, a)
    diag = PicardDiagnostics(estimate=estimate)
    for it in itertools.count(1):
        nxt = picard_step(model, current, a)
        delta = nxt.sup_distance(current)
        diag.differences.append(delta)
        diag.iterations = it
        log.debug("picard iterate %d: sup difference %.3e", it, delta)
        current = nxt
        if delta < tol:
            diag.converged = True
            return current, diag
        if it >= max_iter:
            raise NonConvergenceError(
                f"no convergence after {max_iter} iterations (last difference {delta:.3e})",
                last_difference=delta,
                trajectory=current,
                differences=diag.differences,
            )
