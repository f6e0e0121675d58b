"""Tour of the lattice difference calculus.

Builds small grids under both boundary rules and checks the identities the
conservation structure rests on: laplacian = divergence(gradient(.)),
summation by parts, and the skew flux form of d x lap d.
"""

import numpy as np

from wavemaps import (
    Grid,
    ScalarField,
    VectorField,
    backward_diff,
    divergence,
    forward_diff,
    gradient,
    inner_product,
    laplacian,
)
from wavemaps.grid import backward_diff_values
from wavemaps.rotation import cross3

rng = np.random.default_rng(7)

print("== eigenfunctions of the periodic Laplacian ==")
g = Grid(2, 64)
x, _ = g.meshgrid()
f = ScalarField(g, np.sin(2 * np.pi * x))
eig = -4.0 / g.h ** 2 * np.sin(np.pi * g.h) ** 2
defect = np.max(np.abs(laplacian(f).values - eig * f.values))
print(f"   lap sin(2 pi x) = {eig:.6f} * sin(2 pi x)   (max defect {defect:.2e})")

for bc in ("periodic", "neumann"):
    g = Grid(2, 24, bc)
    f = ScalarField(g, rng.normal(size=g.shape))
    v = VectorField(g, rng.normal(size=g.shape + (3,)))

    comp = np.max(np.abs(laplacian(f).values - divergence(gradient(f)).values))
    dual = inner_product(divergence(v), f) + inner_product(v, gradient(f))
    print(f"== {bc} grid, M=24 ==")
    print(f"   laplacian - div(grad):      {comp:.2e}")
    print(f"   <div v, f> + <v, grad f>:   {dual:.2e}")

    d_vals = rng.normal(size=g.shape + (3,))
    d_vals /= np.linalg.norm(d_vals, axis=-1, keepdims=True)
    d = VectorField(g, d_vals)
    if bc == "periodic":
        lhs = cross3(d.values, laplacian(d).values)
        rhs = np.zeros_like(lhs)
        for comp_idx, (k, l) in enumerate(((1, 2), (2, 0), (0, 1))):
            flux = VectorField.zeros(g)
            for ax in range(g.dim):
                flux.values[..., ax] = (
                    d_vals[..., k] * backward_diff_values(d_vals[..., l], ax, g)
                    - d_vals[..., l] * backward_diff_values(d_vals[..., k], ax, g))
            rhs[..., comp_idx] = divergence(flux).values
        print(f"   d x lap d - div(skew flux): {np.max(np.abs(lhs - rhs)):.2e}")

print("== one-sided differences vanish across Neumann walls ==")
g = Grid(2, 10, "neumann")
f = ScalarField(g, rng.normal(size=g.shape))
print(f"   D+ at the top wall:    {np.max(np.abs(forward_diff(f, 1).values[-1, :])):.1f}")
print(f"   D- at the bottom wall: {np.max(np.abs(backward_diff(f, 1).values[0, :])):.1f}")
