"""Time-marching driver: initialization, per-step diagnostics, run loop.

Initial data is taken on the nodes: the director samples are renormalized
to unit length (the committed error is O(h^2), below the scheme's
accuracy) and the angular momentum is either given directly or formed as
``w = d_t x d`` per node.

The energy ``E_m = 1/2 \\int |grad_h d|^2 + |w|^2 dx`` is exactly conserved
by the scheme at the fixed point; the classical surrogate
``H_m = 1/2 \\int |D_t d|^2 + |grad_h d|^2 dx`` is only bounded.  Both are
reported per step together with the max nodal gradient norm, which is the
blow-up indicator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .fixedpoint import NumericalBlowupError, SolverState, fixed_point_step
from .grid import Grid, VectorField, neighbor_index, stacked_backward_gradient
from .rotation import cross3


class ConvergenceFailure(RuntimeError):
    """The fixed-point solver exhausted its iteration budget mid-run."""


@dataclass
class Diagnostics:
    """One per-step diagnostics row."""

    step: int
    t: float
    energy: float
    kinetic_energy: float
    grad_max: float
    iterations: int
    residual: float
    cumulative_residual: float = 0.0


def initialize(grid: Grid, d0, d0_t=None, w0=None) -> SolverState:
    """Build the starting state from node-sampled data.

    ``d0`` holds unit vectors sampled at the nodes (renormalized here);
    the angular momentum comes from ``w0`` when given, otherwise from
    ``d0_t`` as the per-node cross product ``d0_t x d0``, otherwise zero.
    """
    d_vals = np.asarray(d0, dtype=np.float64)
    if d_vals.shape != grid.shape + (3,):
        raise ValueError(f"d0 has shape {d_vals.shape}, expected {grid.shape + (3,)}")
    norms = np.sqrt(np.sum(d_vals * d_vals, axis=-1, keepdims=True))
    if not np.all(norms > 0):
        raise ValueError("d0 contains a zero-length sample")
    d_vals = d_vals / norms
    if w0 is not None and d0_t is not None:
        raise ValueError("give either d0_t or w0, not both")
    if w0 is not None:
        w_vals = np.asarray(w0, dtype=np.float64)
        if w_vals.shape != grid.shape + (3,):
            raise ValueError(f"w0 has shape {w_vals.shape}, expected {grid.shape + (3,)}")
        w_vals = w_vals.copy()
    elif d0_t is not None:
        dt_vals = np.asarray(d0_t, dtype=np.float64)
        if dt_vals.shape != grid.shape + (3,):
            raise ValueError(f"d0_t has shape {dt_vals.shape}, expected {grid.shape + (3,)}")
        w_vals = cross3(dt_vals, d_vals)
    else:
        w_vals = np.zeros(grid.shape + (3,))
    return SolverState(VectorField(grid, d_vals), VectorField(grid, w_vals))


def _norm_sums(state: SolverState) -> tuple:
    """(sum |grad d|^2, sum |w|^2, max nodal |grad d|^2), unweighted."""
    grid = state.grid
    if _kernels.AVAILABLE and grid.dim == 2:
        dn = neighbor_index(grid.nodes_per_axis, -1, grid.bc)
        return _kernels.state_norms_2d(state.d.values, state.w.values, dn, dn, 1.0 / grid.h)
    grads = stacked_backward_gradient(state.d.values, grid)
    node_sq = np.sum(grads * grads, axis=(-2, -1))
    w = state.w.values
    return float(np.sum(node_sq)), float(np.dot(w.ravel(), w.ravel())), float(np.max(node_sq))


def energy(state: SolverState) -> float:
    """E = 1/2 \\int |grad_h d|^2 + |w|^2 dx."""
    grad_sq, w_sq, _ = _norm_sums(state)
    return 0.5 * state.grid.node_volume * (grad_sq + w_sq)


def grad_max(state: SolverState) -> float:
    """Max over nodes of the Euclidean norm of the gradient matrix of d."""
    _, _, gmax_sq = _norm_sums(state)
    return float(np.sqrt(gmax_sq))


def state_norms(state: SolverState) -> tuple:
    """(energy, grad_max) in one pass over the fields."""
    grad_sq, w_sq, gmax_sq = _norm_sums(state)
    return 0.5 * state.grid.node_volume * (grad_sq + w_sq), float(np.sqrt(gmax_sq))


def kinetic_energy(state: SolverState, next_state: SolverState, dt: float) -> float:
    """H = 1/2 \\int |D_t d|^2 + |grad_h d|^2 dx with the forward difference."""
    grid = state.grid
    grad_sq, _, _ = _norm_sums(state)
    d_t = (next_state.d.values - state.d.values) / dt
    return 0.5 * grid.node_volume * (float(np.dot(d_t.ravel(), d_t.ravel())) + grad_sq)


def default_stride(m_per_axis: int) -> int:
    """Diagnostics cadence: every step up to M=128, every 8th above."""
    return 1 if m_per_axis <= 128 else 8


def run(state0: SolverState, dt: float, t_final: float, tol: float, *,
        max_iter: int = 200, sink=None, stride=None, on_step=None,
        use_fast_path=None) -> SolverState:
    """March ``round(t_final / dt)`` uniform steps from ``state0``.

    Diagnostics rows go to ``sink`` every ``stride`` steps; row ``m``
    describes the state at the start of step ``m`` (so its kinetic energy
    uses the true forward difference) together with that step's iteration
    count and stopping residual.  ``on_step(prev, new, report)`` fires on
    every step regardless of stride.  Non-convergence and non-finite
    iterates abort with context; the realized final time is the returned
    state's ``t``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t_final < 0:
        raise ValueError("t_final must be nonnegative")
    steps = int(round(t_final / dt))
    if stride is None:
        stride = default_stride(state0.grid.m_per_axis)

    if steps == 0:
        if sink is not None:
            e, gmax = state_norms(state0)
            grad_sq, _, _ = _norm_sums(state0)
            h_static = 0.5 * state0.grid.node_volume * grad_sq
            sink(Diagnostics(step=state0.step_index, t=state0.t, energy=e,
                             kinetic_energy=h_static, grad_max=gmax,
                             iterations=0, residual=0.0, cumulative_residual=0.0))
        return state0

    state = state0
    cumulative = 0.0
    for m in range(steps):
        try:
            new_state, report = fixed_point_step(state, dt, tol, max_iter, use_fast_path)
        except NumericalBlowupError as exc:
            raise NumericalBlowupError(
                f"{exc} (step {state.step_index}, t={state.t:.6g})") from exc
        if not report.converged:
            raise ConvergenceFailure(
                f"fixed point not converged after {report.iterations} iterations "
                f"at step {state.step_index}, t={state.t:.6g} "
                f"(residual {report.residual:.3e}, tol {tol:.3e})")
        cumulative += report.residual
        if sink is not None and m % stride == 0:
            e, gmax = state_norms(state)
            sink(Diagnostics(step=state.step_index, t=state.t, energy=e,
                             kinetic_energy=kinetic_energy(state, new_state, dt),
                             grad_max=gmax, iterations=report.iterations,
                             residual=report.residual, cumulative_residual=cumulative))
        if on_step is not None:
            on_step(state, new_state, report)
        state = new_state
    return state
