#!/usr/bin/env python3
"""Fully-online regression under concept drift, in 6-bit fixed point.

The target function switches at t=500 and t=1000. Every learner predicts,
sees the target, and applies exactly one update (batch size 1, no replay).
Cumulative regret = running sum of per-step squared errors, so flat is
good and the post-shift slope shows how fast a model re-adapts.
"""

import numpy as np

from splinefx import FixedFormat, make_kan, make_mlp, regression_stream, run_online

FMT = FixedFormat(6, 2)
SEED = 1

models = {
    "spline [1,1] G=10 (13 params)":
        (make_kan([1, 1], grid_size=10, spline_order=2, fmt=FMT, seed=1001), 0.5),
    "mlp [1,2,2,1] (13 params)":
        (make_mlp([1, 2, 2, 1], fmt=FMT, seed=1001), 0.1),
    "mlp [1,16,16,1] (321 params)":
        (make_mlp([1, 16, 16, 1], fmt=FMT, seed=1001), 0.1),
}

print(f"format <{FMT}>, T=1500, regime changes at t=500 and t=1000\n")
logs = {}
for name, (model, lr) in models.items():
    logs[name] = run_online(model, regression_stream(seed=SEED), lr=lr, T=1500)

print(f"{'model':<34} {'t=500':>8} {'t=1000':>8} {'final':>8}")
for name, log in logs.items():
    r = log.cum_regret
    print(f"{name:<34} {r[499]:>8.2f} {r[999]:>8.2f} {r[-1]:>8.2f}")

print("\nper-step MSE right around the first regime change (spline learner):")
loss = logs["spline [1,1] G=10 (13 params)"].loss
for a, b in ((450, 500), (500, 510), (510, 550), (550, 600)):
    print(f"  mean loss t in [{a},{b}): {loss[a:b].mean():.4f}")
print("the spike at the shift decays within a few dozen steps")
