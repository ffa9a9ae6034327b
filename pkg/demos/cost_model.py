#!/usr/bin/env python3
"""The operation-count cost model: sparse vs dense updates.

Per sample, a dense layer computes one gradient multiply per weight
(d_in*d_out of them); a spline layer touches only the s active coefficients
per edge (d_in*d_out*s), no matter how many coefficients are stored. At an
equal parameter budget N the update-cost ratio is exactly s/(G+s), and
growing G adds capacity without adding per-sample work.
"""

import numpy as np

from splinefx import make_kan, make_mlp, update_cost_ratio

kan = make_kan([1, 1], grid_size=10, spline_order=2)
mlp = make_mlp([13, 1], activation="linear", bias=False)
print(f"budget-matched: spline {kan.param_count()} params vs dense {mlp.param_count()} params")
print(f"measured update-multiply ratio: {update_cost_ratio(kan, mlp)} (s/(G+s) = 3/13)")

kan0 = make_kan([1, 1], grid_size=5, spline_order=0)
mlp0 = make_mlp([6, 1], activation="linear", bias=False)
print(f"order-0 case: {update_cost_ratio(kan0, mlp0)} (s/(G+s) = 1/6)")

print("\ncapacity grows with G, per-sample update work does not:")
print(f"{'G':>4} {'params':>8} {'upd mults/sample':>18}")
for G in (5, 10, 20, 40, 80):
    m = make_kan([2, 3], grid_size=G)
    lrs = m.prepare_lr(0.0)
    for _ in range(4):
        m.train_step(np.zeros(2), np.zeros(3), lrs)
    print(f"{G:>4} {m.param_count():>8} {m.counter.update_mults // 4:>18}")

print("\nthe dense baseline pays for every parameter on every sample:")
for dims in ([2, 10, 1], [2, 40, 1], [2, 160, 1]):
    m = make_mlp(dims, fmt=None)
    lrs = m.prepare_lr(0.0)
    m.train_step(np.zeros(2), np.zeros(1), lrs)
    print(f"  dims {dims}: {m.param_count():>5} params, {m.counter.update_mults:>5} upd mults/sample")
