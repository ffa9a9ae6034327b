#!/usr/bin/env python3
"""Uniform-grid splines via lookup tables: indexing, local support,
partition of unity.

An input is mapped to (cell k, bin u) with pure index arithmetic; only the
s = p+1 basis functions listed in the table are nonzero there, and their
values always sum to 1, so a spline output is a convex combination of its
active coefficients.
"""

import numpy as np

from splinefx import FixedFormat, GridSpec, build_basis_lut, eval_basis, eval_deriv, locate, quantize

grid = GridSpec(x_min=-1.0, x_max=1.0, G=10, p=2, F=8)
print(f"grid: {grid.G} cells of width {grid.H} over [{grid.x_min}, {grid.x_max}], "
      f"order {grid.p}, {grid.n_bins} bins/cell, {grid.coeff_count} coefficients/edge")

fine = FixedFormat(32, 8)
print("\nlocate(): clamped index arithmetic")
for x in (-1.0, 0.35, 0.999, 5.0, -7.0):
    idx = locate(quantize(x, fine), grid)
    print(f"  x={x:>6} -> cell {idx.k}, bin {idx.u}")

lut = build_basis_lut(p=2, F=8)
print("\nactive basis values at a few in-cell positions (rows sum to 1):")
for u in (0, 64, 128, 192, 255):
    vals = lut.b[:, u]
    print(f"  xi={u / 256:>8.4f}: {np.round(vals, 5)}  sum={vals.sum():.10f}")

print("\nworst partition-of-unity error per order:")
for p in range(4):
    table = build_basis_lut(p, 8)
    print(f"  p={p}: {np.max(np.abs(table.b.sum(axis=0) - 1.0)):.2e}")

idx = locate(quantize(0.35, fine), grid)
print(f"\nderivatives at x=0.35 (unit-cell slope scaled by 1/H = {1 / grid.H}):")
print(f"  basis  {np.round(eval_basis(lut, idx), 5)}")
print(f"  d/dx   {np.round(eval_deriv(lut, idx, grid), 5)}")
