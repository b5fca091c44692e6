"""Lie splitting for the 1-D BZ reaction-diffusion system.

One macro step applies the pointwise semi-implicit reaction update at every
node, then an FTCS diffusion step for ``u`` (diffusivity 1) and for ``v``
(diffusivity ``d``; skipped when ``d == 0``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List

import numpy as np

from .errors import DimensionError, PreconditionError, StabilityError
from .model import BZParams, bz_decay, bz_source
from .semi_implicit import quotient_update

# Relative slack when comparing a recomputed mesh ratio against 1/2, so that
# dt = dx**2 / 2 is accepted despite rounding in dt * D / dx**2.
_RATIO_SLACK = 1e-12


class BC(str, Enum):
    NEUMANN = "neumann_homogeneous"
    PERIODIC = "periodic"

    @classmethod
    def parse(cls, value) -> "BC":
        if isinstance(value, cls):
            return value
        aliases = {"neumann": cls.NEUMANN, "neumann_homogeneous": cls.NEUMANN, "periodic": cls.PERIODIC}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown boundary condition {value!r}; use 'neumann' or 'periodic'") from None


@dataclass(frozen=True)
class Grid1D:
    L: float
    J: int
    bc: BC = BC.NEUMANN

    def __post_init__(self):
        if not (np.isfinite(self.L) and self.L > 0):
            raise PreconditionError(f"L must be positive, got {self.L!r}")
        if int(self.J) != self.J or self.J < 3:
            raise PreconditionError(f"J must be an integer >= 3, got {self.J!r}")
        object.__setattr__(self, "J", int(self.J))
        object.__setattr__(self, "bc", BC.parse(self.bc))

    @property
    def dx(self) -> float:
        return self.L / self.J

    @property
    def n_nodes(self) -> int:
        """``J + 1`` nodes for Neumann; ``J`` for periodic (node J is node 0)."""
        return self.J + 1 if self.bc is BC.NEUMANN else self.J

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n_nodes) * self.dx

    def check_field(self, values) -> np.ndarray:
        f = np.asarray(values, dtype=float)
        if f.shape != (self.n_nodes,):
            raise DimensionError(
                f"field of shape {f.shape} does not fit a {self.bc.value} grid with {self.n_nodes} nodes"
            )
        return f


@dataclass(frozen=True)
class SplitState:
    u: np.ndarray
    v: np.ndarray
    k: int
    t: float


def stability_limit(d: float, dx: float) -> float:
    """Largest ``dt`` with ``dt / dx**2 <= 1 / max(2, 2 d)``."""
    if not dx > 0:
        raise PreconditionError(f"dx must be positive, got {dx!r}")
    if not d >= 0:
        raise PreconditionError(f"d must be nonnegative, got {d!r}")
    return dx * dx / max(2.0, 2.0 * d)


def mesh_ratio(diffusivity: float, dt: float, dx: float) -> float:
    """``diffusivity * dt / dx**2``, snapped to 1/2 when it exceeds it by rounding only."""
    lam = diffusivity * dt / (dx * dx)
    if 0.5 < lam <= 0.5 * (1.0 + _RATIO_SLACK):
        lam = 0.5
    return lam


def check_stable(diffusivity: float, dt: float, dx: float) -> float:
    lam = mesh_ratio(diffusivity, dt, dx)
    if lam > 0.5:
        raise StabilityError(
            f"mesh ratio diffusivity*dt/dx^2 = {lam!r} exceeds 1/2 "
            f"(need dt <= dx^2/max{{2,2d}})",
            ratio=lam,
        )
    return lam


def _neighbours(f: np.ndarray, bc: BC):
    if bc is BC.PERIODIC:
        return np.roll(f, 1), np.roll(f, -1)
    left = np.empty_like(f)
    right = np.empty_like(f)
    left[1:] = f[:-1]
    left[0] = f[1]  # mirror ghost f[-1] = f[1]
    right[:-1] = f[1:]
    right[-1] = f[-2]  # mirror ghost f[J+1] = f[J-1]
    return left, right


def ftcs_stencil(f: np.ndarray, lam: float, bc: BC) -> np.ndarray:
    """Plain FTCS update ``(1 - 2 lam) f_j + lam (f_{j-1} + f_{j+1})``, no guard."""
    left, right = _neighbours(f, bc)
    return (1.0 - 2.0 * lam) * f + lam * (left + right)


def ftcs(f: np.ndarray, lam: float, bc: BC) -> np.ndarray:
    """FTCS step for ``lam <= 1/2``, clipped to each node's stencil range.

    For such ``lam`` the update is a convex combination of the stencil, so in
    exact arithmetic it already lies in that range; the clip only removes
    rounding that would otherwise break the discrete maximum principle.
    """
    if lam == 0.0:
        return f.copy()
    left, right = _neighbours(f, bc)
    out = (1.0 - 2.0 * lam) * f + lam * (left + right)
    lo = np.minimum(np.minimum(left, right), f)
    hi = np.maximum(np.maximum(left, right), f)
    return np.clip(out, lo, hi)


def diffusion_substep(field, diffusivity: float, dt: float, grid: Grid1D) -> np.ndarray:
    if not diffusivity >= 0:
        raise PreconditionError(f"diffusivity must be nonnegative, got {diffusivity!r}")
    if not dt > 0:
        raise PreconditionError(f"dt must be positive, got {dt!r}")
    f = grid.check_field(field)
    lam = check_stable(diffusivity, dt, grid.dx)
    return ftcs(f, lam, grid.bc)


def reaction_substep(p: BZParams, s: SplitState, dt: float) -> SplitState:
    """Pointwise semi-implicit BZ reaction update at every node, boundaries included.

    Uses the same arithmetic as ``de_step`` on ``bz_reaction_model(p)``, so
    each node agrees with it bit for bit.
    """
    if not dt > 0:
        raise PreconditionError(f"dt must be positive, got {dt!r}")
    state = np.stack([np.asarray(s.u, dtype=float), np.asarray(s.v, dtype=float)])
    new = quotient_update(state, bz_decay(p, state), bz_source(p, state), dt)
    return SplitState(new[0], new[1], s.k, s.t)


def macro_step(p: BZParams, grid: Grid1D, s: SplitState, dt: float, lam_u: float, lam_v: float) -> SplitState:
    r = reaction_substep(p, s, dt)
    u = ftcs(r.u, lam_u, grid.bc)
    v = r.v if p.d == 0 else ftcs(r.v, lam_v, grid.bc)
    k = s.k + 1
    return SplitState(u, v, k, k * dt)


def run_splitting(
    p: BZParams,
    grid: Grid1D,
    u0,
    v0,
    dt: float,
    n_steps: int,
    snapshot_every: int = 1,
) -> List[SplitState]:
    """Alternate reaction and diffusion substeps ``n_steps`` times.

    Snapshots are taken at ``k = 0``, every ``snapshot_every`` steps, and at
    the final step.
    """
    if not dt > 0:
        raise PreconditionError(f"dt must be positive, got {dt!r}")
    if int(n_steps) != n_steps or n_steps < 1:
        raise PreconditionError(f"n_steps must be a positive integer, got {n_steps!r}")
    if int(snapshot_every) != snapshot_every or snapshot_every < 1:
        raise PreconditionError(f"snapshot_every must be a positive integer, got {snapshot_every!r}")
    lam_u = check_stable(1.0, dt, grid.dx)
    lam_v = check_stable(p.d, dt, grid.dx)
    s = SplitState(grid.check_field(u0).copy(), grid.check_field(v0).copy(), 0, 0.0)
    snapshots = [s]
    for k in range(1, n_steps + 1):
        s = macro_step(p, grid, s, dt, lam_u, lam_v)
        if k % snapshot_every == 0 or k == n_steps:
            snapshots.append(s)
    return snapshots


def unsplit_step(p: BZParams, grid: Grid1D, s: SplitState, dt: float) -> SplitState:
    """Unsplit FTCS + semi-implicit reaction step.

    ``(w_new - w) / dt = D lap(w) - f(w) w_new + g(w)`` for both species, so
    ``w_new = (w + D dt lap(w) + g dt) / (1 + f dt)``.
    """
    lam_u = check_stable(1.0, dt, grid.dx)
    lam_v = check_stable(p.d, dt, grid.dx)
    state = np.stack([s.u, s.v])
    f = bz_decay(p, state)
    g = bz_source(p, state)
    diffused = np.stack([ftcs(s.u, lam_u, grid.bc), ftcs(s.v, lam_v, grid.bc)])
    new = quotient_update(diffused, f, g, dt)
    k = s.k + 1
    return SplitState(new[0], new[1], k, k * dt)


def cell_average(fn: Callable[[np.ndarray], np.ndarray], grid: Grid1D) -> np.ndarray:
    """Average of ``fn`` over each cell ``[x_j - dx/2, x_j + dx/2]`` clipped to ``[0, L]``.

    Simpson's rule on three points per cell; exact for cubics.
    """
    x = grid.x
    a = np.maximum(x - 0.5 * grid.dx, 0.0)
    b = np.minimum(x + 0.5 * grid.dx, grid.L)
    m = 0.5 * (a + b)
    fa, fm, fb = (np.broadcast_to(np.asarray(fn(z), dtype=float), x.shape) for z in (a, m, b))
    return (fa + 4.0 * fm + fb) / 6.0


def in_open_box(values, lo: float, hi: float) -> bool:
    values = np.asarray(values)
    return bool(np.all(values > lo) and np.all(values < hi))


def nodal_sum(field) -> float:
    return math.fsum(np.asarray(field, dtype=float))
