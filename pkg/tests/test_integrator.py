import numpy as np
import pytest

import wavemaps as wm
from wavemaps.fixedpoint import fixed_point_step
from wavemaps.grid import (
    Grid,
    VectorField,
    backward_diff_values,
    divergence,
    laplacian,
)
from wavemaps.integrator import (
    ConvergenceFailure,
    default_stride,
    energy,
    grad_max,
    initialize,
    kinetic_energy,
    run,
    state_norms,
)
from wavemaps.rotation import cross3


def test_initialize_constant_pole():
    g = Grid(2, 8)
    d0 = np.zeros(g.shape + (3,))
    d0[..., 2] = 1.0
    state = initialize(g, d0, d0_t=np.zeros(g.shape + (3,)))
    assert np.all(state.w.values == 0.0)
    assert energy(state) == 0.0
    assert state.step_index == 0 and state.t == 0.0


def test_initialize_renormalizes():
    g = Grid(2, 8)
    d0 = np.zeros(g.shape + (3,))
    d0[..., 0] = 2.0
    state = initialize(g, d0)
    assert np.allclose(state.d.values[..., 0], 1.0)


def test_initialize_angle_data_cross_product():
    g = Grid(2, 16)
    x, y = g.meshgrid()
    th = 2 * np.pi * (x + 2 * y)
    th_t = np.cos(2 * np.pi * x)
    d0 = np.stack([np.cos(th), np.sin(th), np.zeros_like(th)], axis=-1)
    d0_t = th_t[..., None] * np.stack([-np.sin(th), np.cos(th), np.zeros_like(th)], axis=-1)
    state = initialize(g, d0, d0_t=d0_t)
    # symbolic cross product gives w = (0, 0, -th_t)
    assert np.max(np.abs(state.w.values[..., 0])) <= 1e-15
    assert np.max(np.abs(state.w.values[..., 1])) <= 1e-15
    assert np.max(np.abs(state.w.values[..., 2] + th_t)) <= 1e-14
    # numeric cross-product oracle
    assert np.max(np.abs(state.w.values - np.cross(d0_t, d0))) <= 1e-14


def test_initialize_rejects_zero_sample():
    g = Grid(2, 8)
    d0 = np.zeros(g.shape + (3,))
    d0[..., 2] = 1.0
    d0[3, 4] = 0.0
    with pytest.raises(ValueError):
        initialize(g, d0)


def test_initialize_rejects_bad_shapes_and_double_spec():
    g = Grid(2, 8)
    good = np.zeros(g.shape + (3,))
    good[..., 2] = 1.0
    with pytest.raises(ValueError):
        initialize(g, good[:4])
    with pytest.raises(ValueError):
        initialize(g, good, d0_t=good[:, :4])
    with pytest.raises(ValueError):
        initialize(g, good, w0=good[:4])
    with pytest.raises(ValueError):
        initialize(g, good, d0_t=np.zeros_like(good), w0=np.zeros_like(good))


def test_energy_constant_w_on_unit_torus():
    g = Grid(2, 16)
    d0 = np.zeros(g.shape + (3,))
    d0[..., 2] = 1.0
    c = np.array([0.6, -0.8, 0.5])
    state = initialize(g, d0, w0=np.broadcast_to(c, g.shape + (3,)).copy())
    assert energy(state) == pytest.approx(0.5 * np.dot(c, c), rel=1e-13)


def test_energy_matches_naive_double_loop():
    g = Grid(2, 6)
    rng = np.random.default_rng(8)
    d0 = rng.normal(size=g.shape + (3,))
    w0 = rng.normal(size=g.shape + (3,))
    state = initialize(g, d0, w0=w0)
    n = g.nodes_per_axis
    h = g.h
    acc = 0.0
    for i in range(n):
        for j in range(n):
            for c in range(3):
                gx = (state.d.values[i, j, c] - state.d.values[(i - 1) % n, j, c]) / h
                gy = (state.d.values[i, j, c] - state.d.values[i, (j - 1) % n, c]) / h
                acc += gx ** 2 + gy ** 2 + state.w.values[i, j, c] ** 2
    expected = 0.5 * h * h * acc
    assert energy(state) == pytest.approx(expected, rel=1e-12)


def test_state_norms_fast_path_matches_generic():
    for dim, m in ((2, 12), (3, 5)):
        for bc in ("periodic", "neumann"):
            g = Grid(dim, m, bc)
            rng = np.random.default_rng(dim * 10 + m)
            d0 = rng.normal(size=g.shape + (3,))
            w0 = rng.normal(size=g.shape + (3,))
            state = initialize(g, d0, w0=w0)
            grads = np.stack([backward_diff_values(state.d.values, ax, g)
                              for ax in range(g.dim)], axis=-2)
            node_sq = np.sum(grads ** 2, axis=(-2, -1))
            e_ref = 0.5 * g.node_volume * (np.sum(node_sq) + np.sum(state.w.values ** 2))
            gmax_ref = np.sqrt(np.max(node_sq))
            e, gmax = state_norms(state)
            assert e == pytest.approx(e_ref, rel=1e-12)
            assert gmax == pytest.approx(gmax_ref, rel=1e-12)
            assert grad_max(state) == pytest.approx(gmax_ref, rel=1e-12)


def test_kinetic_energy_stationary_is_gradient_part():
    g = Grid(2, 16)
    x, _ = g.meshgrid()
    d0 = np.stack([np.cos(2 * np.pi * x), np.sin(2 * np.pi * x), np.zeros_like(x)], axis=-1)
    state = initialize(g, d0)
    h_val = kinetic_energy(state, state, 0.1)
    grads = np.stack([backward_diff_values(state.d.values, ax, g) for ax in range(2)], axis=-2)
    assert h_val == pytest.approx(0.5 * g.node_volume * np.sum(grads ** 2), rel=1e-12)


def test_kinetic_energy_constant_precession_is_time_part():
    g = Grid(2, 8)
    d0 = np.zeros(g.shape + (3,))
    d0[..., 0] = 1.0
    a = initialize(g, d0)
    d1 = np.zeros(g.shape + (3,))
    d1[..., 0] = np.cos(0.2)
    d1[..., 1] = np.sin(0.2)
    b = initialize(g, d1)
    dt = 0.05
    h_val = kinetic_energy(a, b, dt)
    d_t = (b.d.values - a.d.values) / dt
    assert h_val == pytest.approx(0.5 * g.node_volume * np.sum(d_t ** 2), rel=1e-12)


def test_run_zero_horizon_returns_input_and_one_row():
    g = Grid(2, 8)
    d0 = np.zeros(g.shape + (3,))
    d0[..., 2] = 1.0
    state = initialize(g, d0)
    rows = []
    out = run(state, 0.05, 0.0, 1e-8, sink=rows.append)
    assert out is state
    assert len(rows) == 1
    assert rows[0].step == 0 and rows[0].iterations == 0


def test_run_stationary_state_conserves_everything():
    g = Grid(2, 8)
    d0 = np.zeros(g.shape + (3,))
    d0[..., 2] = 1.0
    state = initialize(g, d0)
    rows = []
    out = run(state, 0.05, 1.0, 1e-12, sink=rows.append)
    assert np.array_equal(out.d.values, state.d.values)
    assert all(r.energy == 0.0 for r in rows)
    assert all(r.iterations == 1 for r in rows)


def test_run_emits_one_row_per_step():
    state = wm.build_dalembert_initial(Grid(2, 16), wm.default_wave_coeffs())
    dt = 0.5 / 16
    rows = []
    run(state, dt, 3 * dt, 1e-6, sink=rows.append)
    assert len(rows) == 3
    assert [r.step for r in rows] == [0, 1, 2]
    assert rows[1].t == pytest.approx(dt)


def test_run_stride_subsamples_rows():
    state = wm.build_dalembert_initial(Grid(2, 16), wm.default_wave_coeffs())
    dt = 0.5 / 16
    rows = []
    run(state, dt, 8 * dt, 1e-6, sink=rows.append, stride=4)
    assert [r.step for r in rows] == [0, 4]
    assert default_stride(128) == 1 and default_stride(256) == 8


def test_run_on_step_sees_every_step():
    state = wm.build_dalembert_initial(Grid(2, 16), wm.default_wave_coeffs())
    dt = 0.5 / 16
    seen = []
    run(state, dt, 5 * dt, 1e-6, stride=100,
        on_step=lambda prev, new, rep: seen.append((prev.step_index, new.step_index)))
    assert seen == [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]


def test_run_abort_on_nonconvergence_has_context():
    state = wm.build_dalembert_initial(Grid(2, 16), wm.default_wave_coeffs())
    dt = 0.5 / 16
    with pytest.raises(ConvergenceFailure, match="step"):
        run(state, dt, 1.0, 1e-15, max_iter=2)


def test_run_argument_validation():
    state = wm.build_dalembert_initial(Grid(2, 8), wm.default_wave_coeffs())
    with pytest.raises(ValueError):
        run(state, -0.1, 1.0, 1e-6)
    with pytest.raises(ValueError):
        run(state, 0.1, -1.0, 1e-6)


def test_energy_conserved_at_tight_tolerance_small_grid():
    g = Grid(2, 16)
    state = wm.build_dalembert_initial(g, wm.default_wave_coeffs())
    e0 = energy(state)
    dt = 0.5 * g.h
    final = run(state, dt, 20 * dt, 1e-12, max_iter=400)
    assert abs(energy(final) - e0) <= 1e-10 * e0


def test_whole_run_length_preservation():
    g = Grid(2, 16)
    state = wm.build_dalembert_initial(g, wm.default_wave_coeffs())
    worst = [0.0]

    def watch(prev, new, rep):
        norms = np.linalg.norm(new.d.values, axis=-1)
        worst[0] = max(worst[0], float(np.max(np.abs(norms - 1.0))))

    run(state, 0.5 * g.h, 50 * 0.5 * g.h, 1e-8, on_step=watch)
    assert worst[0] <= 1e-11


def test_energy_drift_shrinks_with_tolerance():
    g = Grid(2, 32)
    dt = 0.5 * g.h
    drifts = {}
    for tol_factor in (1.0, 0.25):
        state = wm.build_dalembert_initial(g, wm.default_wave_coeffs())
        e0 = energy(state)
        worst = 0.0
        for _ in range(64):
            state, _ = fixed_point_step(state, dt, tol_factor * g.h ** 2)
            worst = max(worst, abs(energy(state) - e0))
        drifts[tol_factor] = worst
    assert drifts[0.25] < drifts[1.0]
    assert drifts[1.0] <= 1e-3 * energy(wm.build_dalembert_initial(g, wm.default_wave_coeffs()))


def test_time_reversal_returns_to_start():
    g = Grid(2, 16)
    state0 = wm.build_dalembert_initial(g, wm.default_wave_coeffs())
    dt = 0.5 * g.h
    state = state0
    for _ in range(10):
        state, rep = fixed_point_step(state, dt, 1e-12, max_iter=400)
        assert rep.converged
    for _ in range(10):
        state, rep = fixed_point_step(state, -dt, 1e-12, max_iter=400)
        assert rep.converged
    assert np.max(np.abs(state.d.values - state0.d.values)) <= 1e-8
    assert np.max(np.abs(state.w.values - state0.w.values)) <= 1e-8


def test_cross_product_divergence_identity_random_unit_fields():
    rng = np.random.default_rng(77)
    for dim, m in ((2, 8), (3, 6)):
        g = Grid(dim, m)
        for _ in range(5):
            vals = rng.normal(size=g.shape + (3,))
            vals /= np.linalg.norm(vals, axis=-1, keepdims=True)
            d = VectorField(g, vals)
            lhs = cross3(d.values, laplacian(d).values)
            rhs = np.zeros_like(lhs)
            for comp, (k, l) in enumerate(((1, 2), (2, 0), (0, 1))):
                flux = VectorField.zeros(g)
                for ax in range(g.dim):
                    flux.values[..., ax] = (
                        vals[..., k] * backward_diff_values(vals[..., l], ax, g)
                        - vals[..., l] * backward_diff_values(vals[..., k], ax, g))
                rhs[..., comp] = divergence(flux).values
            assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_per_step_work_is_node_linear_and_iterations_flat():
    """Cost model: iterations per step do not grow with resolution."""
    counts = {}
    for m in (16, 32, 64):
        g = Grid(2, m)
        state = wm.build_dalembert_initial(g, wm.default_wave_coeffs())
        dt = 0.5 * g.h
        iters = []
        for _ in range(10):
            state, rep = fixed_point_step(state, dt, g.h ** 2)
            iters.append(rep.iterations)
        counts[m] = np.mean(iters)
    assert counts[64] <= counts[16] + 2.0
    assert all(2.0 <= c <= 15.0 for c in counts.values())
