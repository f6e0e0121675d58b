import numpy as np
import pytest

import wavemaps as wm
from wavemaps.fixedpoint import (
    NumericalBlowupError,
    SolverState,
    fixed_point_step,
    residual,
)
from wavemaps.grid import BoundaryRule, Grid, VectorField
from wavemaps.rotation import RotationParams, v_matrix


def constant_state(grid, d0, w0):
    d = VectorField(grid, np.broadcast_to(np.asarray(d0, float), grid.shape + (3,)).copy())
    w = VectorField(grid, np.broadcast_to(np.asarray(w0, float), grid.shape + (3,)).copy())
    return SolverState(d, w)


def smooth_state(m=32, bc=BoundaryRule.PERIODIC):
    grid = Grid(2, m, bc)
    return wm.build_dalembert_initial(grid, wm.default_wave_coeffs()), grid


def test_stationary_state_is_immediate_fixed_point():
    grid = Grid(2, 8)
    state = constant_state(grid, (0.0, 0.0, 1.0), (0.0, 0.0, 0.0))
    new, report = fixed_point_step(state, 0.05, 1e-12)
    assert report.converged
    assert report.iterations == 1
    assert np.array_equal(new.d.values, state.d.values)
    assert np.array_equal(new.w.values, state.w.values)
    assert new.step_index == 1
    assert new.t == pytest.approx(0.05)


@pytest.mark.parametrize("fast", [False, True])
def test_constant_precession_matches_rotation_oracle(fast):
    grid = Grid(2, 8)
    w0 = np.array([0.4, -1.2, 2.0])
    d0 = np.array([1.0, 0.0, 0.0])
    state = constant_state(grid, d0, w0)
    dt = 0.03
    new, report = fixed_point_step(state, dt, 1e-13, use_fast_path=fast)
    assert report.converged
    assert report.iterations <= 2
    expected = v_matrix(RotationParams(dt, w0)) @ d0
    assert np.max(np.abs(new.d.values - expected)) <= 1e-14
    assert np.max(np.abs(new.w.values - w0)) == 0.0


def test_residual_of_identical_iterates_is_zero():
    state, _ = smooth_state(8)
    pair = (state.d, state.w)
    assert residual(pair, pair) == 0.0


def test_residual_constant_w_offset_is_its_norm():
    grid = Grid(2, 16)
    state = constant_state(grid, (0.0, 0.0, 1.0), (0.0, 0.0, 0.0))
    c = np.array([0.3, -0.4, 1.2])
    shifted = VectorField(grid, state.w.values + c)
    res = residual((state.d, state.w), (state.d, shifted))
    assert res == pytest.approx(np.linalg.norm(c), rel=1e-13)


def test_residual_matches_naive_summation():
    grid = Grid(2, 6)
    rng = np.random.default_rng(3)
    d1 = VectorField(grid, rng.normal(size=grid.shape + (3,)))
    d2 = VectorField(grid, rng.normal(size=grid.shape + (3,)))
    w1 = VectorField(grid, rng.normal(size=grid.shape + (3,)))
    w2 = VectorField(grid, rng.normal(size=grid.shape + (3,)))
    h = grid.h
    n = grid.nodes_per_axis
    w_sum = 0.0
    g_sum = 0.0
    for i in range(n):
        for j in range(n):
            for c in range(3):
                w_sum += (w2.values[i, j, c] - w1.values[i, j, c]) ** 2
                diff = d2.values - d1.values
                g0 = (diff[i, j, c] - diff[(i - 1) % n, j, c]) / h
                g1 = (diff[i, j, c] - diff[i, (j - 1) % n, c]) / h
                g_sum += g0 ** 2 + g1 ** 2
    expected = np.sqrt(h * h * w_sum) + np.sqrt(h * h * g_sum)
    got = residual((d1, w1), (d2, w2))
    assert got == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("fast", [False, True])
def test_length_preserved_at_every_iterate_and_step(fast):
    state, grid = smooth_state(16)
    dt = 0.5 * grid.h
    for _ in range(10):
        state, report = fixed_point_step(state, dt, 1e-10, use_fast_path=fast)
        assert report.converged
        norms = np.linalg.norm(state.d.values, axis=-1)
        assert np.max(np.abs(norms - 1.0)) <= 1e-12


def test_residual_history_decays_geometrically():
    state, grid = smooth_state(32)
    dt = 0.5 * grid.h
    _, report = fixed_point_step(state, dt, 1e-12, max_iter=400)
    hist = np.asarray(report.residual_history)
    assert len(hist) >= 4
    ratios = hist[1:] / hist[:-1]
    # contraction ratio bounded away from one
    assert np.max(ratios[1:]) < 0.8
    assert report.residual == hist[-1]


def test_iteration_count_scales_with_log_tolerance():
    state, grid = smooth_state(32)
    dt = 0.5 * grid.h
    counts = {}
    for tol in (1e-4, 1e-8, 1e-12):
        _, report = fixed_point_step(state, dt, tol, max_iter=400)
        assert report.converged
        counts[tol] = report.iterations
    assert counts[1e-4] <= counts[1e-8] <= counts[1e-12]
    # logarithmic cost: bounded number of extra iterations per decade
    per_decade = (counts[1e-12] - counts[1e-4]) / 8.0
    assert per_decade <= 3.0


def test_non_convergence_reported_not_raised():
    state, grid = smooth_state(16)
    new, report = fixed_point_step(state, 0.5 * grid.h, 1e-14, max_iter=2)
    assert not report.converged
    assert report.iterations == 2
    assert report.residual >= 1e-14
    assert isinstance(new, SolverState)


@pytest.mark.parametrize("fast", [False, True])
def test_non_finite_iterate_raises(fast):
    grid = Grid(2, 8)
    state = constant_state(grid, (0.0, 0.0, 1.0), (1e200, 0.0, 0.0))
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(NumericalBlowupError):
            fixed_point_step(state, 1e160, 1e-8, use_fast_path=fast)


@pytest.mark.parametrize("bc", [BoundaryRule.PERIODIC, BoundaryRule.NEUMANN])
def test_fast_path_matches_generic_route(bc):
    state, grid = smooth_state(16, bc)
    dt = 0.5 * grid.h
    s_fast, s_ref = state, state
    for _ in range(5):
        s_fast, rep_fast = fixed_point_step(s_fast, dt, 1e-9, use_fast_path=True)
        s_ref, rep_ref = fixed_point_step(s_ref, dt, 1e-9, use_fast_path=False)
        assert rep_fast.iterations == rep_ref.iterations
    assert np.max(np.abs(s_fast.d.values - s_ref.d.values)) <= 1e-11
    assert np.max(np.abs(s_fast.w.values - s_ref.w.values)) <= 1e-9


def test_three_dimensional_step_conserves():
    grid = Grid(3, 8)
    rng = np.random.default_rng(9)
    x, y, z = grid.meshgrid()
    d0 = np.stack([np.cos(2 * np.pi * x) * np.sin(2 * np.pi * y),
                   np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y),
                   np.cos(2 * np.pi * y)], axis=-1)
    state = wm.initialize(grid, d0, w0=0.1 * rng.normal(size=grid.shape + (3,)))
    e0 = wm.energy(state)
    dt = 0.25 * grid.h
    for _ in range(5):
        state, report = fixed_point_step(state, dt, 1e-12, max_iter=400)
        assert report.converged
    assert np.max(np.abs(np.linalg.norm(state.d.values, axis=-1) - 1.0)) <= 1e-12
    assert abs(wm.energy(state) - e0) <= 1e-9 * e0


def test_step_argument_validation():
    state, _ = smooth_state(8)
    with pytest.raises(ValueError):
        fixed_point_step(state, 0.0, 1e-8)
    with pytest.raises(ValueError):
        fixed_point_step(state, 0.01, 0.0)
    with pytest.raises(ValueError):
        fixed_point_step(state, 0.01, 1e-8, max_iter=0)
    grid3 = Grid(3, 4)
    st3 = constant_state(grid3, (0, 0, 1), (0, 0, 0))
    with pytest.raises(ValueError):
        fixed_point_step(st3, 0.01, 1e-8, use_fast_path=True)


def test_state_grid_mismatch_rejected():
    d = VectorField.zeros(Grid(2, 8))
    w = VectorField.zeros(Grid(2, 16))
    with pytest.raises(ValueError):
        SolverState(d, w)
