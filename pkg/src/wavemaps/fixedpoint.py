"""Contractive iteration advancing one time step of the implicit scheme.

A step from ``(d^m, w^m)`` solves the nonlinear midpoint system

    (d' - d^m) / dt = (d^m + d')/2 x (w^m + w')/2,
    (w' - w^m) / dt = lap((d^m + d')/2) x (d^m + d')/2,

by iterating: freeze the angular-momentum average at the previous iterate,
solve the then-linear director relation exactly per node with the closed
rotation (so every iterate keeps ``|d_i| = |d^m_i|`` to rounding), then
refresh the angular momentum.  The map contracts in L2 when ``dt <= kappa h``
with ``kappa`` small; ``kappa = 1/2`` works in practice and the iteration
ends when the L2 distance between consecutive iterates,

    |w_{s+1} - w_s|_2 + |grad d_{s+1} - grad d_s|_2,

drops below the tolerance.  The accepted iterate becomes step ``m + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .grid import (
    Grid,
    VectorField,
    laplacian_values,
    neighbor_index,
    stacked_backward_gradient,
)
from .rotation import cross3, rotate_values


class NumericalBlowupError(ArithmeticError):
    """An iterate left the representable range (NaN/inf)."""


@dataclass
class SolverState:
    """Director/angular-momentum pair at one time level."""

    d: VectorField
    w: VectorField
    step_index: int = 0
    t: float = 0.0

    def __post_init__(self):
        if self.d.grid != self.w.grid:
            raise ValueError("d and w must share one grid")

    @property
    def grid(self) -> Grid:
        return self.d.grid

    def copy(self) -> "SolverState":
        return SolverState(self.d.copy(), self.w.copy(), self.step_index, self.t)


@dataclass
class StepReport:
    """Outcome of one fixed-point solve."""

    iterations: int
    residual: float
    converged: bool
    residual_history: tuple = field(default=(), repr=False)


def _l2_of_values(values: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(grid.node_volume * np.dot(values.ravel(), values.ravel())))


def residual(prev_iterate, next_iterate) -> float:
    """Stopping-criterion distance between two (d, w) iterates."""
    d_prev, w_prev = prev_iterate
    d_next, w_next = next_iterate
    grid = d_prev.grid
    w_part = _l2_of_values(w_next.values - w_prev.values, grid)
    grad_diff = stacked_backward_gradient(d_next.values - d_prev.values, grid)
    return w_part + _l2_of_values(grad_diff, grid)


def _use_kernels(grid: Grid, use_fast_path) -> bool:
    if use_fast_path is None:
        return _kernels.AVAILABLE and grid.dim == 2
    if use_fast_path and not (_kernels.AVAILABLE and grid.dim == 2):
        raise ValueError("fast path requires numba and a 2-D grid")
    return bool(use_fast_path)


def fixed_point_step(state: SolverState, dt: float, tol: float, max_iter: int = 200,
                     use_fast_path=None) -> tuple:
    """Advance one time step to tolerance ``tol``.

    Returns the accepted next state and a :class:`StepReport`.  A report
    with ``converged=False`` means ``max_iter`` was exhausted; the caller
    decides whether to abort.  Non-finite iterates raise
    :class:`NumericalBlowupError`.
    """
    if not np.isfinite(dt) or dt == 0.0:
        raise ValueError("dt must be finite and nonzero")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    grid = state.grid
    d_m = state.d.values
    w_m = state.w.values

    if _use_kernels(grid, use_fast_path):
        d_new, w_new, report = _iterate_fused_2d(grid, d_m, w_m, dt, tol, max_iter)
    else:
        d_new, w_new, report = _iterate_generic(grid, d_m, w_m, dt, tol, max_iter)

    new_state = SolverState(
        VectorField(grid, d_new),
        VectorField(grid, w_new),
        step_index=state.step_index + 1,
        t=state.t + dt,
    )
    return new_state, report


def _iterate_generic(grid: Grid, d_m, w_m, dt, tol, max_iter):
    vol = grid.node_volume
    w_s = w_m
    d_prev = d_m
    history = []
    converged = False
    res = np.inf
    iterations = 0
    for _ in range(max_iter):
        d_new = rotate_values(0.5 * (w_m + w_s), d_m, dt)
        d_mid = 0.5 * (d_m + d_new)
        w_new = w_m + dt * cross3(laplacian_values(d_mid, grid), d_mid)
        dw = w_new - w_s
        grad_diff = stacked_backward_gradient(d_new - d_prev, grid)
        res = float(np.sqrt(vol * np.dot(dw.ravel(), dw.ravel()))
                    + np.sqrt(vol * np.dot(grad_diff.ravel(), grad_diff.ravel())))
        iterations += 1
        history.append(res)
        d_prev, w_s = d_new, w_new
        if not np.isfinite(res):
            raise NumericalBlowupError(
                f"non-finite iterate after {iterations} fixed-point iterations")
        if res < tol:
            converged = True
            break
    return d_prev, w_s, StepReport(iterations, res, converged, tuple(history))


def _iterate_fused_2d(grid: Grid, d_m, w_m, dt, tol, max_iter):
    n = grid.nodes_per_axis
    up = neighbor_index(n, 1, grid.bc)
    dn = neighbor_index(n, -1, grid.bc)
    inv_h = 1.0 / grid.h
    vol = grid.node_volume
    w_s = w_m
    d_prev = d_m
    history = []
    converged = False
    res = np.inf
    iterations = 0
    for _ in range(max_iter):
        d_new, w_new, res_w_sq, res_g_sq = _kernels.step_iteration_2d(
            d_m, w_m, w_s, d_prev, up, dn, up, dn, dt, inv_h)
        res = float(np.sqrt(vol * res_w_sq) + np.sqrt(vol * res_g_sq))
        iterations += 1
        history.append(res)
        d_prev, w_s = d_new, w_new
        if not np.isfinite(res):
            raise NumericalBlowupError(
                f"non-finite iterate after {iterations} fixed-point iterations")
        if res < tol:
            converged = True
            break
    return d_prev, w_s, StepReport(iterations, res, converged, tuple(history))
