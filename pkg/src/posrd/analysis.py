"""Diagnostics: region checks, the upper root of the BZ cubic, and convergence orders."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, PreconditionError
from .model import BZParams
from .splitting import SplitState

COMPONENTS = ("u", "v")


@dataclass(frozen=True)
class Region:
    """Open box ``prod_i (lo_i, hi_i)``."""

    lo: Tuple[float, ...]
    hi: Tuple[float, ...]

    def __post_init__(self):
        lo, hi = tuple(map(float, self.lo)), tuple(map(float, self.hi))
        if len(lo) != len(hi):
            raise ValueError("lo and hi must have the same length")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ValueError(f"empty region: lo={lo}, hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def discrete_bz(cls, p: BZParams) -> "Region":
        """``(q, 1)^2``, invariant for the split scheme."""
        return cls((p.q, p.q), (1.0, 1.0))

    def contains(self, *components) -> bool:
        return all(
            bool(np.all(np.asarray(c) > lo) and np.all(np.asarray(c) < hi))
            for c, lo, hi in zip(components, self.lo, self.hi)
        )


@dataclass(frozen=True)
class Violation:
    k: int
    j: int
    component: str
    value: float
    bound: str  # "lo" or "hi"


@dataclass
class ViolationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.violations

    def __bool__(self):
        return not self.empty

    def summary(self, limit: int = 5) -> str:
        if self.empty:
            return "no violations"
        shown = ", ".join(
            f"k={w.k} j={w.j} {w.component}={w.value!r} ({w.bound})" for w in self.violations[:limit]
        )
        more = len(self.violations) - limit
        return shown + (f" ... and {more} more" if more > 0 else "")


def check_region(snapshots: Iterable[SplitState], r: Region) -> ViolationReport:
    """Every nodal value outside the open region, across all snapshots."""
    report = ViolationReport()
    for s in snapshots:
        for name, values, lo, hi in zip(COMPONENTS, (s.u, s.v), r.lo, r.hi):
            values = np.asarray(values)
            for j in np.flatnonzero(~(values > lo)):
                report.violations.append(Violation(s.k, int(j), name, float(values[j]), "lo"))
            for j in np.flatnonzero(values >= hi):
                report.violations.append(Violation(s.k, int(j), name, float(values[j]), "hi"))
    return report


def first_entry_step(snapshots: Sequence[SplitState], r: Region) -> Optional[int]:
    """Smallest snapshot step ``k0`` from which every later snapshot lies in ``r``.

    Purely an observation tool for runs started outside the region.
    """
    k0 = None
    for s in snapshots:
        if r.contains(s.u, s.v):
            if k0 is None:
                k0 = s.k
        else:
            k0 = None
    return k0


def bz_cubic(p: BZParams, u):
    """``u (1-u) (u+q) - eps h q (u-q)``."""
    return u * (1.0 - u) * (u + p.q) - p.epsilon * p.h * p.q * (u - p.q)


def ubar(p: BZParams, tol: float = 1e-12, max_iter: int = 400) -> float:
    """Root of the BZ cubic in ``(q, 1)`` by bisection.

    Stops once the bracket is no wider than ``tol`` and the residual is
    below ``tol``, or when the bracket cannot be split further in floating
    point.
    """
    lo, hi = p.q, 1.0
    f_lo, f_hi = bz_cubic(p, lo), bz_cubic(p, hi)
    if not (f_lo > 0 and f_hi < 0):
        raise PreconditionError(f"cubic does not change sign on [q, 1]: phi(q)={f_lo!r}, phi(1)={f_hi!r}")
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = bz_cubic(p, mid)
        if hi - lo <= tol and abs(f_mid) < tol:
            return mid
        if mid <= lo or mid >= hi or f_mid == 0:
            return mid
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
    return mid


def convergence_order(errors: Sequence[Tuple[float, float]]) -> float:
    """Least-squares slope of ``log(error)`` against ``log(dt)``."""
    pairs = np.asarray(errors, dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2 or pairs.shape[0] < 2:
        raise PreconditionError("need at least two (dt, error) pairs")
    dt, err = pairs[:, 0], pairs[:, 1]
    if np.any(~(dt > 0)) or np.any(~(err > 0)):
        raise PreconditionError("step sizes and errors must be positive")
    if np.any(np.diff(dt) >= 0):
        raise PreconditionError("step sizes must be strictly decreasing")
    x, y = np.log(dt), np.log(err)
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def forward_euler_counterexample(p: BZParams, state, dt: float) -> Tuple[float, float]:
    """One plain forward Euler step of the uniform-in-space BZ reaction.

    No positivity guarantee; kept to show what the semi-implicit update avoids.
    """
    u, v = map(float, state)
    if not u + p.q > 0:
        raise DomainError(f"BZ reaction undefined at u = {u!r}")
    du = u * (1.0 - u) / p.epsilon - p.h * v * (u - p.q) / (u + p.q)
    dv = u - v
    return u + dt * du, v + dt * dv
