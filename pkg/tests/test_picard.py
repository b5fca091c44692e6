import math

import numpy as np
import pytest

from posrd import (
    PAPER_PARAMS,
    DEConfig,
    ModelSpec,
    NonConvergenceError,
    PreconditionError,
    TimeGrid,
    Trajectory,
    bz_reaction_model,
    existence_horizon,
    picard_step,
    solve_de,
    solve_picard,
)


def const_model(fv, gv, dim=1):
    return ModelSpec(dim, lambda s: np.full_like(s, fv), lambda s: np.full_like(s, gv))


def test_horizon_constant_rates():
    est = existence_horizon(const_model(1.0, 1.0), [1.0])
    assert (est.M_f, est.M_g) == (1.0, 1.0)
    assert est.T0 == pytest.approx(1 / 3)
    assert est.ball_radius == 2.0


def test_horizon_zero_source_is_infinite_term():
    est = existence_horizon(const_model(1.0, 0.0), [1.0])
    assert est.M_g == 0.0
    assert est.T0 == pytest.approx(1 / 3)


def test_horizon_zero_initial_data_rejected():
    with pytest.raises(PreconditionError):
        existence_horizon(const_model(1.0, 1.0), [0.0])


def test_horizon_bz_matches_brute_force_lattice():
    p = PAPER_PARAMS
    est = existence_horizon(bz_reaction_model(p), [0.5, 0.5], samples_per_axis=101)
    # independent scalar loop over the same 101 x 101 lattice on [0, 1]^2
    M_f = M_g = 0.0
    for i in range(101):
        for j in range(101):
            u, v = i / 100, j / 100
            f1 = u / p.epsilon + p.h * v / (u + p.q)
            g1 = u / p.epsilon + p.h * p.q * v / (u + p.q)
            M_f = max(M_f, abs(f1), 1.0)
            M_g = max(M_g, abs(g1), abs(u))
    assert est.M_f == pytest.approx(M_f, rel=1e-12)
    assert est.M_g == pytest.approx(M_g, rel=1e-12)
    assert est.T0 == pytest.approx(min(1 / (3 * M_f), 0.5 / (3 * M_g)), rel=1e-12)
    assert 0 < est.T0 < math.inf


def test_step_without_dynamics_returns_a():
    grid = TimeGrid(0.01, 11)
    a = np.array([0.3, 0.7])
    out = picard_step(const_model(0.0, 0.0, dim=2), Trajectory.constant(grid, a), a)
    np.testing.assert_array_equal(out.states, np.tile(a, (11, 1)))


def _relax_error(dt):
    grid = TimeGrid.covering(1.0, dt)
    out = picard_step(const_model(1.0, 1.0), Trajectory.constant(grid, [0.0]), [0.0])
    return np.max(np.abs(out.states[:, 0] - (1 - np.exp(-grid.nodes))))


def test_step_relaxation_second_order():
    assert _relax_error(0.01) < 1e-5
    ratio = _relax_error(0.02) / _relax_error(0.01)
    assert 3.5 <= ratio <= 4.5


def test_step_nonnegative_for_bz():
    rng = np.random.default_rng(7)
    m = bz_reaction_model(PAPER_PARAMS)
    grid = TimeGrid(1e-3, 50)
    for _ in range(20):
        prev = Trajectory(grid, rng.uniform(0, 2, (50, 2)))
        out = picard_step(m, prev, rng.uniform(0, 1, 2))
        assert np.all(out.states >= 0)


def test_constant_rates_converge_in_two_iterations():
    traj, diag = solve_picard(const_model(2.0, 1.0), [1.0], horizon=0.1, dt_fine=1e-3)
    assert diag.iterations == 2
    assert diag.differences[1] == 0.0
    assert diag.converged


def test_zero_data_zero_source():
    m = ModelSpec(2, lambda s: np.ones_like(s), lambda s: s.copy())
    traj, diag = solve_picard(m, [0.0, 0.0], horizon=1.0, dt_fine=0.1)
    assert diag.iterations == 1
    assert np.all(traj.states == 0)


def test_horizon_beyond_T0_rejected_unless_unsafe():
    m = const_model(1.0, 1.0)
    with pytest.raises(PreconditionError):
        solve_picard(m, [1.0], horizon=1.0, dt_fine=0.01)
    traj, _ = solve_picard(m, [1.0], horizon=1.0, dt_fine=0.01, unsafe=True)
    assert traj.grid.horizon == pytest.approx(1.0)


def test_nonconvergence_is_reported():
    logistic = ModelSpec(1, lambda s: s.copy(), lambda s: np.ones_like(s))
    with pytest.raises(NonConvergenceError) as info:
        solve_picard(logistic, [1.0], horizon=1 / 6, dt_fine=1e-3, tol=1e-14, max_iter=3)
    assert info.value.last_difference > 0
    assert len(info.value.differences) == 3


@pytest.mark.parametrize(
    "model, a",
    [
        (ModelSpec(1, lambda s: s.copy(), lambda s: np.ones_like(s)), [1.0]),
        (ModelSpec(2, lambda s: np.stack([s[1], s[0]]), lambda s: np.stack([1 + 0 * s[0], s[0]])), [0.5, 1.0]),
        (bz_reaction_model(PAPER_PARAMS), [0.5, 0.5]),
    ],
)
def test_iterates_positive_bounded_and_contracting(model, a):
    est = existence_horizon(model, a)
    traj, diag = solve_picard(model, a, horizon=est.T0, dt_fine=est.T0 / 200, tol=1e-13)
    assert np.all(traj.states >= 0)
    assert np.max(np.abs(traj.states)) <= 2 * max(a)
    d = diag.differences
    assert all(d[i + 1] <= 0.9 * d[i] for i in range(1, len(d) - 1) if d[i] > 1e-14)


def test_every_iterate_positive_and_bounded():
    model = ModelSpec(1, lambda s: s.copy(), lambda s: np.ones_like(s))
    a = np.array([1.0])
    grid = TimeGrid.covering(1 / 6, 1e-3)
    it = Trajectory.constant(grid, a)
    for _ in range(15):
        it = picard_step(model, it, a)
        assert np.all(it.states >= 0)
        assert np.max(it.states) <= 2.0


def test_picard_agrees_with_de_on_bz():
    m = bz_reaction_model(PAPER_PARAMS)
    a = [0.5, 0.5]
    T0 = existence_horizon(m, a).T0
    dt = 1e-6
    n = int(min(T0, 0.05) / dt)
    traj, diag = solve_picard(m, a, horizon=n * dt, dt_fine=dt / 10)
    de = solve_de(m, a, DEConfig(dt, n))
    assert np.max(np.abs(traj.states[::10] - de.states)) <= 1e-4
