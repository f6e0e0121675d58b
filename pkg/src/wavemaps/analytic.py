"""Closed-form 2-D reference solutions and the three error metrics.

In two dimensions a sphere-valued wave map can be written through an
angle, ``d = (cos th, sin th, 0)``, and the angle solves the plain linear
wave equation ``th_tt = lap th``.  Superpositions of plane waves along the
two diagonals,

    th(t,x,y) = sum_j  a_j+ sin(2 pi j (sqrt(2) t + (x+y))) + ...,

with sin/cos amplitudes ``a, b`` on ``x+y`` and ``c, d`` on ``x-y``, are
exact solutions (each diagonal direction has |k| = sqrt(2) |k_x|, hence
the sqrt(2) speed).  The matching angular momentum is ``w = (0, 0, -th_t)``.

Errors of a numeric run are measured as suprema over the time steps of

* ``|d(t_m) - d_m|_L2``,
* ``|w(t_m) - w_m|_L2``,
* ``sqrt(|grad d(t_m) - grad_h d_m|^2 + |d_t(t_m) - D_t d_m|^2)``,

pairing the exact node gradient/time derivative with the discrete ones.
They are accumulated online; at the final step the last available forward
time difference stands in for ``D_t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fixedpoint import SolverState
from .grid import Grid, VectorField, stacked_backward_gradient

SQRT2 = float(np.sqrt(2.0))

_VALUE, _DT, _DS = 0, 1, 2


@dataclass(frozen=True)
class DAlembertCoeffs:
    """Mode amplitudes of the plane-wave superposition, j = -J..J.

    ``a``/``b`` are the sin/cos amplitudes on the ``x+y`` diagonal,
    ``c``/``d`` the same on ``x-y``; each array has length ``2 J + 1``
    and is indexed by ``j + J``.
    """

    j_max: int
    a_plus: np.ndarray
    a_minus: np.ndarray
    b_plus: np.ndarray
    b_minus: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    d_plus: np.ndarray
    d_minus: np.ndarray

    def __post_init__(self):
        if self.j_max < 0:
            raise ValueError("j_max must be nonnegative")
        n = 2 * self.j_max + 1
        for name in ("a_plus", "a_minus", "b_plus", "b_minus",
                     "c_plus", "c_minus", "d_plus", "d_minus"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (n,):
                raise ValueError(f"{name} must have length {n}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite amplitudes")
            object.__setattr__(self, name, arr)

    @classmethod
    def from_modes(cls, a_plus=None, a_minus=None, b_plus=None, b_minus=None,
                   c_plus=None, c_minus=None, d_plus=None, d_minus=None,
                   j_max=None) -> "DAlembertCoeffs":
        """Build from sparse ``{j: amplitude}`` maps."""
        tables = [dict(tbl or {}) for tbl in
                  (a_plus, a_minus, b_plus, b_minus, c_plus, c_minus, d_plus, d_minus)]
        if j_max is None:
            j_max = max((abs(j) for tbl in tables for j in tbl), default=0)
        arrays = []
        for tbl in tables:
            arr = np.zeros(2 * j_max + 1)
            for j, amp in tbl.items():
                if abs(j) > j_max:
                    raise ValueError(f"mode {j} outside j_max={j_max}")
                arr[j + j_max] = float(amp)
            arrays.append(arr)
        return cls(j_max, *arrays)


def _family(t: float, s: np.ndarray, sin_p, sin_m, cos_p, cos_m,
            j_max: int, order: int) -> np.ndarray:
    """One diagonal family evaluated at phase variable ``s``.

    ``order`` selects the value, the t-derivative, or the s-derivative.
    """
    out = np.zeros_like(np.asarray(s, dtype=np.float64))
    for idx, j in enumerate(range(-j_max, j_max + 1)):
        ap, am, bp, bm = sin_p[idx], sin_m[idx], cos_p[idx], cos_m[idx]
        if ap == 0.0 and am == 0.0 and bp == 0.0 and bm == 0.0:
            continue
        k = 2.0 * np.pi * j
        phase_p = k * (SQRT2 * t + s)
        phase_m = k * (SQRT2 * t - s)
        if order == _VALUE:
            out += ap * np.sin(phase_p) + am * np.sin(phase_m)
            out += bp * np.cos(phase_p) + bm * np.cos(phase_m)
        elif order == _DT:
            kt = k * SQRT2
            out += kt * (ap * np.cos(phase_p) + am * np.cos(phase_m))
            out -= kt * (bp * np.sin(phase_p) + bm * np.sin(phase_m))
        else:
            out += k * (ap * np.cos(phase_p) - am * np.cos(phase_m))
            out -= k * (bp * np.sin(phase_p) - bm * np.sin(phase_m))
    return out


def theta(t: float, x, y, coeffs: DAlembertCoeffs) -> np.ndarray:
    """Angle of the reference solution at time ``t``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return (_family(t, x + y, coeffs.a_plus, coeffs.a_minus, coeffs.b_plus,
                    coeffs.b_minus, coeffs.j_max, _VALUE)
            + _family(t, x - y, coeffs.c_plus, coeffs.c_minus, coeffs.d_plus,
                      coeffs.d_minus, coeffs.j_max, _VALUE))


def theta_t(t: float, x, y, coeffs: DAlembertCoeffs) -> np.ndarray:
    """Exact time derivative of :func:`theta`."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return (_family(t, x + y, coeffs.a_plus, coeffs.a_minus, coeffs.b_plus,
                    coeffs.b_minus, coeffs.j_max, _DT)
            + _family(t, x - y, coeffs.c_plus, coeffs.c_minus, coeffs.d_plus,
                      coeffs.d_minus, coeffs.j_max, _DT))


def theta_gradient(t: float, x, y, coeffs: DAlembertCoeffs) -> tuple:
    """Exact spatial gradient ``(th_x, th_y)`` of :func:`theta`."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    fu = _family(t, x + y, coeffs.a_plus, coeffs.a_minus, coeffs.b_plus,
                 coeffs.b_minus, coeffs.j_max, _DS)
    fv = _family(t, x - y, coeffs.c_plus, coeffs.c_minus, coeffs.d_plus,
                 coeffs.d_minus, coeffs.j_max, _DS)
    return fu + fv, fu - fv


def analytic_state(t: float, coeffs: DAlembertCoeffs, grid: Grid) -> SolverState:
    """Reference state ``d = (cos th, sin th, 0)``, ``w = (0, 0, -th_t)``."""
    if grid.dim != 2:
        raise ValueError("reference solutions are 2-D")
    xg, yg = grid.meshgrid()
    th = theta(t, xg, yg, coeffs)
    tht = theta_t(t, xg, yg, coeffs)
    d = VectorField.from_components(grid, np.cos(th), np.sin(th), 0.0)
    w = VectorField.from_components(grid, 0.0, 0.0, -tht)
    return SolverState(d, w, step_index=0, t=float(t))


class ProfileEvaluator:
    """Fast per-step evaluation of th, th_t and grad th on one grid.

    On the lattice the diagonal variables ``x + y`` and ``x - y`` take only
    ``2 n - 1`` distinct values, so each family is evaluated on a short 1-D
    profile and spread over the grid by a gather.  Agrees with the direct
    formulas to rounding.
    """

    def __init__(self, grid: Grid, coeffs: DAlembertCoeffs):
        if grid.dim != 2:
            raise ValueError("profile evaluation is 2-D")
        self.grid = grid
        self.coeffs = coeffs
        n = grid.nodes_per_axis
        h = grid.h
        x0, y0 = grid.origin
        k = np.arange(2 * n - 1)
        self._u_vals = (x0 + y0) + h * k
        self._v_vals = (x0 - y0) + h * (k - (n - 1))
        idx = np.arange(n)
        self._iu = idx[:, None] + idx[None, :]
        self._iv = idx[:, None] - idx[None, :] + (n - 1)

    def eval(self, t: float) -> tuple:
        """Arrays ``(th, th_t, th_x, th_y)`` of shape ``grid.shape``."""
        c = self.coeffs
        ab = (c.a_plus, c.a_minus, c.b_plus, c.b_minus)
        cd = (c.c_plus, c.c_minus, c.d_plus, c.d_minus)
        out = []
        fu_s = _family(t, self._u_vals, *ab, c.j_max, _DS)[self._iu]
        fv_s = _family(t, self._v_vals, *cd, c.j_max, _DS)[self._iv]
        for order in (_VALUE, _DT):
            fu = _family(t, self._u_vals, *ab, c.j_max, order)
            fv = _family(t, self._v_vals, *cd, c.j_max, order)
            out.append(fu[self._iu] + fv[self._iv])
        return out[0], out[1], fu_s + fv_s, fu_s - fv_s


class ErrorTracker:
    """Online suprema of the three error metrics along a numeric run.

    Feed every step with ``observe(state, next_d_values)``; after the loop
    call ``observe(final_state)`` once so the final row reuses the last
    forward time difference.
    """

    def __init__(self, grid: Grid, coeffs: DAlembertCoeffs, dt: float,
                 record_series: bool = True):
        self._prof = ProfileEvaluator(grid, coeffs)
        self.grid = grid
        self.dt = float(dt)
        self._vol = grid.node_volume
        self._prev_d = None
        self._count = 0
        self._sup_d = 0.0
        self._sup_w = 0.0
        self._sup_e = 0.0
        self.series = [] if record_series else None

    @staticmethod
    def _sq(arr: np.ndarray) -> float:
        flat = arr.ravel()
        return float(np.dot(flat, flat))

    def observe(self, state: SolverState, next_d_values=None) -> tuple:
        th, tht, thx, thy = self._prof.eval(state.t)
        sin_th = np.sin(th)
        cos_th = np.cos(th)
        d = state.d.values
        w = state.w.values

        e_d_sq = (self._sq(d[..., 0] - cos_th) + self._sq(d[..., 1] - sin_th)
                  + self._sq(d[..., 2]))
        e_w_sq = (self._sq(w[..., 0]) + self._sq(w[..., 1])
                  + self._sq(w[..., 2] + tht))

        gd = stacked_backward_gradient(d, self.grid)
        e_g_sq = (self._sq(gd[..., 0, 0] + thx * sin_th)
                  + self._sq(gd[..., 0, 1] - thx * cos_th)
                  + self._sq(gd[..., 0, 2])
                  + self._sq(gd[..., 1, 0] + thy * sin_th)
                  + self._sq(gd[..., 1, 1] - thy * cos_th)
                  + self._sq(gd[..., 1, 2]))

        if next_d_values is not None:
            d_t = (next_d_values - d) / self.dt
        elif self._prev_d is not None:
            d_t = (d - self._prev_d) / self.dt
        else:
            d_t = None
        if d_t is None:
            e_t_sq = 0.0
        else:
            e_t_sq = (self._sq(d_t[..., 0] + tht * sin_th)
                      + self._sq(d_t[..., 1] - tht * cos_th)
                      + self._sq(d_t[..., 2]))

        vol = self._vol
        e_d = float(np.sqrt(vol * e_d_sq))
        e_w = float(np.sqrt(vol * e_w_sq))
        e_e = float(np.sqrt(vol * (e_g_sq + e_t_sq)))
        self._sup_d = max(self._sup_d, e_d)
        self._sup_w = max(self._sup_w, e_w)
        self._sup_e = max(self._sup_e, e_e)
        self._count += 1
        self._prev_d = d
        if self.series is not None:
            self.series.append((state.step_index, state.t, e_d, e_w, e_e))
        return e_d, e_w, e_e

    def _require_data(self):
        if self._count == 0:
            raise ValueError("no steps observed")

    @property
    def error_d(self) -> float:
        self._require_data()
        return self._sup_d

    @property
    def error_w(self) -> float:
        self._require_data()
        return self._sup_w

    @property
    def error_energy(self) -> float:
        self._require_data()
        return self._sup_e


def error_d(run: ErrorTracker) -> float:
    """Sup over steps of the L2 director discrepancy."""
    return run.error_d


def error_w(run: ErrorTracker) -> float:
    """Sup over steps of the L2 angular-momentum discrepancy."""
    return run.error_w


def error_energy(run: ErrorTracker) -> float:
    """Sup over steps of the energy-norm discrepancy."""
    return run.error_energy
