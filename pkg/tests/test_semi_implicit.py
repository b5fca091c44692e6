import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from posrd import PAPER_PARAMS, DEConfig, ModelSpec, PreconditionError, bz_reaction_model, convergence_order, de_step, solve_de


def const_model(fv, gv, dim=1):
    return ModelSpec(dim, lambda s: np.full_like(s, fv), lambda s: np.full_like(s, gv))


RELAX = const_model(1.0, 1.0)  # u' = -u + 1


@pytest.mark.parametrize("dt", [1e-6, 0.1, 1.0, 1e3, 1e6])
def test_fixed_point_g_over_f(dt):
    assert de_step(RELAX, [1.0], dt)[0] == 1.0


def test_pure_decay_one_step():
    assert de_step(const_model(1.0, 0.0), [2.0], 1.0)[0] == 2.0 / (1.0 + 1.0)
    assert de_step(const_model(1.0, 0.0), [2.0], 1.0)[0] == 1.0


@pytest.mark.parametrize("dt", [1e-3, 1.0, 1e6])
def test_origin_fixed_for_bz(dt):
    out = de_step(bz_reaction_model(PAPER_PARAMS), [0.0, 0.0], dt)
    np.testing.assert_array_equal(out, [0.0, 0.0])


def test_negative_input_rejected():
    with pytest.raises(PreconditionError):
        de_step(RELAX, [-1e-300], 0.1)


def test_nonpositive_dt_rejected():
    with pytest.raises(PreconditionError):
        de_step(RELAX, [1.0], 0.0)


def test_solve_de_closed_form():
    traj = solve_de(RELAX, [0.0], DEConfig(0.1, 10))
    k = np.arange(11)
    np.testing.assert_allclose(traj.states[:, 0], 1.0 - 1.1 ** (-k), rtol=0, atol=1e-15)
    np.testing.assert_allclose(traj.times, 0.1 * k)


def test_solve_de_bz_large_dt_stays_positive():
    traj = solve_de(bz_reaction_model(PAPER_PARAMS), [0.5, 0.5], DEConfig(10.0, 200))
    assert np.all(traj.states > 0)
    assert np.all(np.isfinite(traj.states))


def _error_at_one(dt):
    n = round(1.0 / dt)
    return abs(solve_de(RELAX, [0.0], DEConfig(dt, n)).states[-1, 0] - (1.0 - math.exp(-1.0)))


def test_first_order_halving_ratio():
    ratio = _error_at_one(0.01) / _error_at_one(0.005)
    assert 1.8 <= ratio <= 2.2


def test_fitted_order():
    dts = [0.1, 0.05, 0.025, 0.0125]
    assert 0.9 <= convergence_order([(dt, _error_at_one(dt)) for dt in dts]) <= 1.1


rates = st.floats(0, 1e3, allow_nan=False)


@settings(max_examples=300)
@given(
    st.lists(st.floats(0, 1e6), min_size=1, max_size=4),
    rates,
    rates,
    st.floats(1e-6, 1e6),
)
def test_unconditional_positivity(u, c_f, c_g, dt):
    m = ModelSpec(
        len(u),
        lambda s: c_f * s**2 / (1 + s) + c_f,
        lambda s: c_g * np.roll(s, 1) / (1 + s),
    )
    assert np.all(de_step(m, u, dt) >= 0)


@settings(max_examples=200)
@given(st.floats(0, 100), st.floats(1e-6, 1e6))
def test_monotone_damping_without_source(u, dt):
    m = ModelSpec(1, lambda s: 1 + s, lambda s: np.zeros_like(s))
    assert de_step(m, [u], dt)[0] <= u


@settings(max_examples=200)
@given(st.floats(0.1, 10), st.floats(0, 10), st.floats(1e-6, 1e6))
def test_equilibrium_preserved(f, ustar, dt):
    m = const_model(f, f * ustar)
    assert de_step(m, [ustar], dt)[0] == pytest.approx(ustar, rel=1e-14, abs=1e-300)
