"""Uniform node lattices and the first-order difference calculus.

The solver works on a regular grid over either the n-torus (wrap-around
indexing, ``M`` nodes per axis) or a closed box with homogeneous Neumann
walls (endpoints included, ``M + 1`` nodes per axis).  Spacing is always
``h = extent / M``.

Stencil closures at Neumann walls are chosen so that three identities hold
exactly (up to rounding) on both boundary rules:

* ``laplacian == divergence(gradient(.))`` node for node,
* summation by parts: ``<divergence(v), f> == -<v, gradient(f)>``,
* the Laplacian is symmetric, which the discrete energy balance needs.

Concretely, one-sided differences that would reach across a wall evaluate
to zero (ghost node copies the wall value), and the forward divergence
treats component ``j`` of its argument as a flux through the face behind
the node in direction ``j``, with zero flux through the walls.

All operations are pure: inputs are never mutated and results live in
fresh buffers, so callers may distribute node-wise work freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class BoundaryRule(Enum):
    """Boundary closure for difference stencils."""

    PERIODIC = "periodic"
    NEUMANN = "neumann"

    @classmethod
    def coerce(cls, value) -> "BoundaryRule":
        if isinstance(value, BoundaryRule):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown boundary rule {value!r}; "
                             f"expected 'periodic' or 'neumann'") from None


@dataclass(frozen=True)
class Grid:
    """Uniform lattice over a box or torus of side ``extent``.

    Parameters
    ----------
    dim : int
        Spatial dimension, 2 or 3.
    m_per_axis : int
        Number of spacings per axis, so ``h = extent / m_per_axis``.
    bc : BoundaryRule or str
        Periodic grids carry ``m_per_axis`` wrap-around nodes per axis,
        Neumann grids ``m_per_axis + 1`` (both endpoints).
    origin : float or tuple of float
        Lower-left corner, e.g. ``-0.5`` for the centered unit box.
    extent : float
        Axis length; ``h * m_per_axis == extent``.
    """

    dim: int
    m_per_axis: int
    bc: BoundaryRule = BoundaryRule.PERIODIC
    origin: tuple = 0.0
    extent: float = 1.0

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if int(self.m_per_axis) != self.m_per_axis or self.m_per_axis < 2:
            raise ValueError(f"m_per_axis must be an integer >= 2, got {self.m_per_axis}")
        object.__setattr__(self, "m_per_axis", int(self.m_per_axis))
        object.__setattr__(self, "bc", BoundaryRule.coerce(self.bc))
        orig = self.origin
        if np.isscalar(orig):
            orig = (float(orig),) * self.dim
        else:
            orig = tuple(float(c) for c in orig)
        if len(orig) != self.dim:
            raise ValueError(f"origin needs {self.dim} coordinates, got {len(orig)}")
        object.__setattr__(self, "origin", orig)
        object.__setattr__(self, "extent", float(self.extent))
        if not self.extent > 0:
            raise ValueError("extent must be positive")

    @property
    def h(self) -> float:
        return self.extent / self.m_per_axis

    @property
    def nodes_per_axis(self) -> int:
        if self.bc is BoundaryRule.PERIODIC:
            return self.m_per_axis
        return self.m_per_axis + 1

    @property
    def shape(self) -> tuple:
        return (self.nodes_per_axis,) * self.dim

    @property
    def num_nodes(self) -> int:
        return self.nodes_per_axis ** self.dim

    @property
    def node_volume(self) -> float:
        """Quadrature weight h^n of one node."""
        return self.h ** self.dim

    def axis_coords(self, axis0: int) -> np.ndarray:
        """Node coordinates along 0-based axis ``axis0``."""
        return self.origin[axis0] + self.h * np.arange(self.nodes_per_axis)

    def meshgrid(self) -> list:
        """Per-axis coordinate arrays of shape ``grid.shape`` (ij indexing)."""
        return list(np.meshgrid(*(self.axis_coords(a) for a in range(self.dim)),
                                indexing="ij"))


def _as_values(values, shape, what: str) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.shape != shape:
        raise ValueError(f"{what} has shape {v.shape}, expected {shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{what} contains non-finite entries")
    return v


@dataclass
class ScalarField:
    """One double per node."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = _as_values(self.values, self.grid.shape, "scalar field")

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())


@dataclass
class VectorField:
    """One R^3 value per node; in 2-D the third difference slot stays zero."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = _as_values(self.values, self.grid.shape + (3,), "vector field")

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls(grid, np.zeros(grid.shape + (3,)))

    @classmethod
    def from_components(cls, grid: Grid, c1, c2, c3) -> "VectorField":
        vals = np.zeros(grid.shape + (3,))
        vals[..., 0] = c1
        vals[..., 1] = c2
        vals[..., 2] = c3
        return cls(grid, vals)

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.values.copy())


# ---------------------------------------------------------------------------
# array-level stencils (shared by the public ops and the stepping code)

def neighbor_index(n: int, step: int, bc: BoundaryRule) -> np.ndarray:
    """Index of the node ``step`` places along one axis, with ghost rule."""
    idx = np.arange(n, dtype=np.int64) + step
    if bc is BoundaryRule.PERIODIC:
        idx %= n
    else:
        np.clip(idx, 0, n - 1, out=idx)
    return idx


def _shifted(values: np.ndarray, axis0: int, step: int, grid: Grid) -> np.ndarray:
    idx = neighbor_index(grid.nodes_per_axis, step, grid.bc)
    return np.take(values, idx, axis=axis0)


def forward_diff_values(values: np.ndarray, axis0: int, grid: Grid) -> np.ndarray:
    """(f(x + h e) - f(x)) / h; zero across a Neumann wall."""
    return (_shifted(values, axis0, 1, grid) - values) / grid.h


def backward_diff_values(values: np.ndarray, axis0: int, grid: Grid) -> np.ndarray:
    """(f(x) - f(x - h e)) / h; zero across a Neumann wall."""
    return (values - _shifted(values, axis0, -1, grid)) / grid.h


def _axis_slice(ndim: int, axis0: int, sl) -> tuple:
    idx = [slice(None)] * ndim
    idx[axis0] = sl
    return tuple(idx)


def flux_forward_diff_values(values: np.ndarray, axis0: int, grid: Grid) -> np.ndarray:
    """Forward difference of a flux component along its own axis.

    Entry ``i`` of the input is read as the flux through the face between
    nodes ``i - 1`` and ``i``.  Periodic grids wrap; Neumann walls carry
    zero flux, which pairs this operator exactly with the backward
    gradient under summation by parts.
    """
    if grid.bc is BoundaryRule.PERIODIC:
        return (_shifted(values, axis0, 1, grid) - values) / grid.h
    ndim = values.ndim
    out = np.empty_like(values)
    lo = _axis_slice(ndim, axis0, 0)
    hi = _axis_slice(ndim, axis0, -1)
    inner_out = _axis_slice(ndim, axis0, slice(1, -1))
    up = _axis_slice(ndim, axis0, slice(2, None))
    mid = _axis_slice(ndim, axis0, slice(1, -1))
    out[lo] = values[_axis_slice(ndim, axis0, 1)]
    out[inner_out] = values[up] - values[mid]
    out[hi] = -values[hi]
    out /= grid.h
    return out


def laplacian_values(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Divergence of the backward gradient, component by component."""
    if values.ndim == grid.dim + 1:
        out = np.empty_like(values)
        for c in range(values.shape[-1]):
            out[..., c] = laplacian_values(values[..., c], grid)
        return out
    out = np.zeros_like(values)
    for axis0 in range(grid.dim):
        g = backward_diff_values(values, axis0, grid)
        out += flux_forward_diff_values(g, axis0, grid)
    return out


def stacked_backward_gradient(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Backward differences along every axis, stacked on a new axis.

    Scalars of shape ``(*s,)`` give ``(*s, dim)``; vectors of shape
    ``(*s, 3)`` give ``(*s, dim, 3)``.
    """
    grads = [backward_diff_values(values, axis0, grid) for axis0 in range(grid.dim)]
    if values.ndim == grid.dim:
        return np.stack(grads, axis=-1)
    return np.stack(grads, axis=-2)


# ---------------------------------------------------------------------------
# public field operations

def _check_axis(field, axis: int) -> int:
    if not 1 <= axis <= field.grid.dim:
        raise ValueError(f"axis must be in 1..{field.grid.dim}, got {axis}")
    return axis - 1


def forward_diff(field: ScalarField, axis: int) -> ScalarField:
    """Forward difference along coordinate direction ``axis`` (1-based)."""
    axis0 = _check_axis(field, axis)
    return ScalarField(field.grid, forward_diff_values(field.values, axis0, field.grid))


def backward_diff(field: ScalarField, axis: int) -> ScalarField:
    """Backward difference along coordinate direction ``axis`` (1-based)."""
    axis0 = _check_axis(field, axis)
    return ScalarField(field.grid, backward_diff_values(field.values, axis0, field.grid))


def gradient(field: ScalarField) -> VectorField:
    """Backward gradient, padded with zero components up to R^3."""
    grid = field.grid
    vals = np.zeros(grid.shape + (3,))
    for axis0 in range(grid.dim):
        vals[..., axis0] = backward_diff_values(field.values, axis0, grid)
    return VectorField(grid, vals)


def divergence(field: VectorField) -> ScalarField:
    """Forward divergence pairing with :func:`gradient` under summation by parts."""
    grid = field.grid
    out = np.zeros(grid.shape)
    for axis0 in range(grid.dim):
        out += flux_forward_diff_values(field.values[..., axis0], axis0, grid)
    return ScalarField(grid, out)


def laplacian(field):
    """Standard central Laplacian, realized as divergence(gradient(.))."""
    if isinstance(field, ScalarField):
        return ScalarField(field.grid, laplacian_values(field.values, field.grid))
    if isinstance(field, VectorField):
        return VectorField(field.grid, laplacian_values(field.values, field.grid))
    raise TypeError(f"expected a field, got {type(field).__name__}")


def _check_pair(a, b):
    if type(a) is not type(b):
        raise TypeError("fields must be of the same kind")
    if a.grid != b.grid:
        raise ValueError("fields must share one grid")


def inner_product(a, b) -> float:
    """h^n-weighted Euclidean pairing, the discrete integral over the domain."""
    _check_pair(a, b)
    return a.grid.node_volume * float(np.dot(a.values.ravel(), b.values.ravel()))


def l2_norm(a) -> float:
    return float(np.sqrt(max(inner_product(a, a), 0.0)))
