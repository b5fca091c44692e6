"""Problem data for ``u' = -F(u) u + g(u)`` and the Keener-Tyson BZ reaction.

State arrays carry components along axis 0.  Evaluators may receive extra
trailing axes (a batch of states, or the nodes of a 1-D field) and must
broadcast over them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError, DomainError

Evaluator = Callable[[np.ndarray], np.ndarray]


def as_state(values, dim: Optional[int] = None) -> np.ndarray:
    s = np.asarray(values, dtype=float)
    if s.ndim == 0:
        s = s.reshape(1)
    if s.ndim != 1 or s.size == 0:
        raise DimensionError(f"state must be a nonempty 1-D vector, got shape {s.shape}")
    if dim is not None and s.size != dim:
        raise DimensionError(f"state has length {s.size}, model expects {dim}")
    return s


def max_norm(v) -> float:
    """Return ``max_i |v_i|``."""
    a = np.asarray(v, dtype=float)
    if a.size == 0:
        raise DimensionError("max_norm of an empty vector")
    return float(np.max(np.abs(a)))


@dataclass(frozen=True)
class ModelSpec:
    """Diagonal decay rates ``f_i`` and sources ``g_i`` of an m-component system.

    ``decay`` and ``source`` map a state of shape ``(m, ...)`` to an array of
    the same shape.  Both must be nonnegative on the nonnegative orthant.
    Set ``vectorized=False`` for evaluators that only accept a single 1-D
    state; batch calls are then looped.
    """

    dim: int
    decay: Evaluator
    source: Evaluator
    lipschitz_hint: Optional[float] = None
    vectorized: bool = True
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DimensionError(f"dim must be a positive integer, got {self.dim!r}")
        if self.lipschitz_hint is not None and self.lipschitz_hint < 0:
            raise ValueError("lipschitz_hint must be nonnegative")

    def _call(self, fn: Evaluator, s: np.ndarray) -> np.ndarray:
        if s.shape[0] != self.dim:
            raise DimensionError(f"state has {s.shape[0]} components, model expects {self.dim}")
        if self.vectorized or s.ndim == 1:
            out = np.asarray(fn(s), dtype=float)
        else:
            flat = s.reshape(self.dim, -1)
            out = np.stack([np.asarray(fn(flat[:, i]), dtype=float) for i in range(flat.shape[1])], axis=1)
            out = out.reshape(s.shape)
        return np.broadcast_to(out, s.shape)

    def f(self, s) -> np.ndarray:
        return self._call(self.decay, np.asarray(s, dtype=float))

    def g(self, s) -> np.ndarray:
        return self._call(self.source, np.asarray(s, dtype=float))


def evaluate_rhs(model: ModelSpec, s) -> np.ndarray:
    """Componentwise ``-f_i(s) s_i + g_i(s)``."""
    s = np.asarray(s, dtype=float)
    return -model.f(s) * s + model.g(s)


@dataclass(frozen=True)
class BZParams:
    """Constants of the Keener-Tyson reaction term; ``h`` is always ``rho / epsilon``."""

    epsilon: float
    q: float
    d: float
    rho: float
    h: float = field(init=False)

    def __post_init__(self):
        for name in ("epsilon", "q", "d", "rho"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        if not 0 < self.q < 1:
            raise ValueError(f"q must lie in (0, 1), got {self.q!r}")
        if not self.d >= 0:
            raise ValueError(f"d must be nonnegative, got {self.d!r}")
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho!r}")
        object.__setattr__(self, "h", self.rho / self.epsilon)


# eps = 0.032, q = 2e-4, d = 0.6 * eps, rho = 1/2
PAPER_PARAMS = BZParams(epsilon=0.032, q=2.0e-4, d=0.0192, rho=0.5)


def _check_bz_domain(u: np.ndarray, q: float) -> None:
    if np.any(~(u + q > 0)):
        bad = np.asarray(u)[~(u + q > 0)].ravel()[0]
        raise DomainError(f"BZ reaction undefined at u = {bad!r} (needs u + q > 0, q = {q!r})")


def bz_decay(p: BZParams, s: np.ndarray) -> np.ndarray:
    u, v = s[0], s[1]
    _check_bz_domain(u, p.q)
    return np.stack([u / p.epsilon + p.h * v / (u + p.q), np.ones_like(v)])


def bz_source(p: BZParams, s: np.ndarray) -> np.ndarray:
    u, v = s[0], s[1]
    _check_bz_domain(u, p.q)
    return np.stack([u / p.epsilon + p.h * p.q * v / (u + p.q), u.copy()])


def bz_reaction_model(p: BZParams) -> ModelSpec:
    """Uniform-in-space BZ reaction as a two-component ``ModelSpec``.

    ``-f_1 u + g_1 = u(1-u)/eps - h v (u-q)/(u+q)`` and ``-f_2 v + g_2 = u - v``.
    """
    return ModelSpec(
        dim=2,
        decay=lambda s: bz_decay(p, s),
        source=lambda s: bz_source(p, s),
        name="bz",
    )
