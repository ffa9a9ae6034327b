"""Acceptance gate: one test per primary criterion, at the stated
tolerances and runtime budgets, printing a pass/fail line each.

Stream seeds 0..9 pair with init seeds 1000..1009 throughout; they were
fixed before any results were inspected. Kernel JIT compilation is a
build-time cost (disk-cached), so the session warms the kernels once
before any timed section.
"""

import os
import time
from pathlib import Path

import numpy as np
import pytest

from splinefx.fixedpoint import FixedFormat
from splinefx.model import make_kan, make_mlp
from splinefx.streams import (DigitsStreamConfig, XorStreamConfig, bundled_digits_rows,
                              digits_stream_from_rows, load_digits_file,
                              regression_stream, rotating_xor_stream)
from splinefx.trainer import run_online

SEEDS = range(10)


def report(name: str, passed: bool, detail: str) -> bool:
    print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    return passed


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    """Trigger every JIT kernel once so runtime budgets measure emulation."""
    for fmt in (FixedFormat(6, 2), None):
        k = make_kan([2, 2], grid_size=4, fmt=fmt, grid_range=(-1, 1))
        m = make_mlp([2, 2], fmt=fmt)
        for mod in (k, m):
            mod.train_step(np.zeros(2), np.zeros(2), mod.prepare_lr(0.1))


def regression_run(model, seed, lr):
    return run_online(model, regression_stream(seed=seed), lr=lr, T=1500)


def kan_b1(seed):
    return make_kan([1, 1], grid_size=10, spline_order=2, grid_range=(-1, 1),
                    fmt=FixedFormat(6, 2), seed=1000 + seed)


def test_criterion_1_theorem_suite():
    from splinefx.verify import run_all

    t0 = time.perf_counter()
    results = run_all()
    elapsed = time.perf_counter() - t0
    for r in results:
        print(f"    [{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail}")
    ok = all(r.passed for r in results) and elapsed < 30.0
    assert report("theorem_property_suite", ok,
                  f"{sum(r.passed for r in results)}/{len(results)} checks, {elapsed:.1f}s (< 30s)")


def test_criterion_2_benchmark1_regret():
    t0 = time.perf_counter()
    finals = {}
    for name, build, lr in (
        ("kan", kan_b1, 0.5),
        ("mlp_p", lambda s: make_mlp([1, 2, 2, 1], fmt=FixedFormat(6, 2), seed=1000 + s), 0.1),
        ("mlp_l", lambda s: make_mlp([1, 16, 16, 1], fmt=FixedFormat(6, 2), seed=1000 + s), 0.1),
    ):
        finals[name] = [regression_run(build(s), s, lr).final_regret for s in SEEDS]
    elapsed = time.perf_counter() - t0
    kan_median = float(np.median(finals["kan"]))
    order_wins = sum(1 for s in SEEDS
                     if finals["kan"][s] < finals["mlp_l"][s] < finals["mlp_p"][s])
    ok = kan_median <= 30.0 and order_wins >= 8 and elapsed < 10.0
    assert report(
        "benchmark1_regret", ok,
        f"KAN median {kan_median:.1f} (<= 30; reference value 13.2), "
        f"KAN < MLP-L < MLP-P on {order_wins}/10 seeds (>= 8), {elapsed:.1f}s (< 10s)")


def test_criterion_3_benchmark1_drift_adaptation():
    """50-step post-shift MSE must return below 2x the pre-shift 50-step
    average within 100 steps of each regime change, on >= 8/10 seeds.

    Known red: the second regime's gradient energy is ~2.7x the first's, so
    its tracking floor sits at 2-3x the pre-shift average even in float
    mode; see the repository notes for the full analysis.
    """
    ok_seeds = 0
    ratios = {500: [], 1000: []}
    for s in SEEDS:
        log = regression_run(kan_b1(s), s, 0.5)
        good = True
        for shift in (500, 1000):
            pre = log.loss[shift - 50:shift].mean()
            best = min(log.loss[st:st + 50].mean() for st in range(shift, shift + 101))
            ratios[shift].append(best / pre)
            good = good and (best < 2.0 * pre)
        ok_seeds += good
    ok = ok_seeds >= 8
    assert report("benchmark1_drift_adaptation", ok,
                  f"recovered below 2x pre-shift floor on {ok_seeds}/10 seeds (>= 8); "
                  f"median post/pre floor ratio: {np.median(ratios[500]):.2f} at t=500, "
                  f"{np.median(ratios[1000]):.2f} at t=1000")


def test_criterion_4_bitwidth_robustness():
    """KAN regret at W=6 within 3x of W=12; MLP-L at W=6 at least 5x W=12.

    Known red on the MLP clause: with saturating per-assignment arithmetic
    the parameter-starved updates stall gracefully (W=6 regret ~48, matching
    the benchmark reference 48.3) instead of blowing up, and W=12 converges like
    float (~26), leaving the ratio near 1.8.
    """
    med = {}
    for name, build, lr in (
        ("kan", lambda f, s: make_kan([1, 1], grid_size=10, grid_range=(-1, 1),
                                      fmt=f, seed=1000 + s), 0.5),
        ("mlp_l", lambda f, s: make_mlp([1, 16, 16, 1], fmt=f, seed=1000 + s), 0.1),
    ):
        for W in (6, 12):
            fmt = FixedFormat(W, 2)
            med[name, W] = float(np.median(
                [regression_run(build(fmt, s), s, lr).final_regret for s in SEEDS]))
    kan_ratio = med["kan", 6] / med["kan", 12]
    mlp_ratio = med["mlp_l", 6] / med["mlp_l", 12]
    ok = kan_ratio <= 3.0 and mlp_ratio >= 5.0
    assert report("bitwidth_robustness", ok,
                  f"KAN W6/W12 = {kan_ratio:.2f} (<= 3); MLP-L W6/W12 = {mlp_ratio:.2f} (>= 5)")


def test_criterion_5_benchmark2_accuracy():
    t0 = time.perf_counter()
    acc = {}
    for name, build, lr in (
        ("kan", lambda s: make_kan([2, 7, 1], grid_size=10, grid_range=(-4, 4),
                                   fmt=FixedFormat(7, 3), seed=1000 + s, task="binary"), 0.05),
        ("mlp_p", lambda s: make_mlp([2, 20, 8, 5, 1], fmt=FixedFormat(10, 3),
                                     seed=1000 + s, task="binary"), 0.01),
        ("mlp_l", lambda s: make_mlp([2, 16, 16, 16, 1], fmt=FixedFormat(10, 3),
                                     seed=1000 + s, task="binary"), 0.015),
    ):
        acc[name] = [run_online(build(s), rotating_xor_stream(XorStreamConfig(seed=s), T=8000),
                                lr=lr, T=8000).correct.mean() for s in SEEDS]
    elapsed = time.perf_counter() - t0
    kan_median = float(np.median(acc["kan"]))
    above_both = all(np.median(acc["kan"]) > np.median(acc[m]) for m in ("mlp_p", "mlp_l"))
    ok = kan_median >= 0.85 and above_both and elapsed < 30.0
    assert report(
        "benchmark2_accuracy", ok,
        f"KAN median {kan_median:.3f} (>= 0.85; reference value 0.928), "
        f"MLP-P {np.median(acc['mlp_p']):.3f}, MLP-L {np.median(acc['mlp_l']):.3f}, "
        f"{elapsed:.1f}s (< 30s)")


def test_criterion_6_capacity_scaling():
    """Accuracy nondecreasing (1-point noise allowance) across G, at the
    shipped sweep's fixed 10-bit format, median over 5 seeds."""
    meds = {}
    for G in (3, 5, 10, 20):
        accs = []
        for s in range(5):
            m = make_kan([2, 7, 1], grid_size=G, grid_range=(-4, 4),
                         fmt=FixedFormat(10, 3), seed=1000 + s, task="binary")
            accs.append(run_online(m, rotating_xor_stream(XorStreamConfig(seed=s), T=8000),
                                   lr=0.05, T=8000).correct.mean())
        meds[G] = float(np.median(accs))
    pairs = [(3, 5), (5, 10), (10, 20)]
    ok = all(meds[b] >= meds[a] - 0.01 for a, b in pairs)
    assert report("capacity_scaling", ok,
                  "median acc by G: " + ", ".join(f"G={g}: {meds[g]:.3f}" for g in (3, 5, 10, 20)))


def _digits_corpus():
    """The full 5,620-row corpus when available, else the bundled subset
    with the rotating phase extended to reach the same ~225-degree drift."""
    env = os.environ.get("SPLINEFX_DIGITS")
    candidates = [env] if env else []
    candidates.append(Path(__file__).parent.parent / "data" / "optdigits.csv")
    for cand in candidates:
        if cand and Path(cand).exists():
            rows = load_digits_file(cand)
            if len(rows) == 5620:
                return rows, 8
    try:
        rows = bundled_digits_rows()
    except ImportError:
        pytest.skip("digits corpus unavailable: no dataset file and no scikit-learn")
    return rows, round(8 * 5620 / len(rows))


def test_criterion_7_digits_drift():
    rows, n_rot = _digits_corpus()
    n = len(rows)
    T = n * (2 + n_rot)
    t0 = time.perf_counter()

    def build():
        return make_kan([64, 10], grid_size=5, spline_order=2, grid_range=(0.0, 1.0),
                        fmt=FixedFormat(21, 5), init_scale=0.1, seed=42,
                        loss_kind="softmax_cross_entropy", task="multiclass")

    def stream():
        return digits_stream_from_rows(rows, DigitsStreamConfig(
            seed=3, n_stationary=2, n_rotating=n_rot))

    online = run_online(build(), stream(), lr=0.1, T=T, window=1000)
    frozen = run_online(build(), stream(), lr=0.1, T=T, window=1000, freeze_after=2 * n)
    elapsed = time.perf_counter() - t0
    last = slice(T - n, T)
    o = float(online.run_acc[last].mean())
    f = float(frozen.run_acc[last].mean())
    ok = o >= 0.60 and f <= 0.35 and o >= 2.5 * f and elapsed < 120.0
    assert report(
        "digits_drift", ok,
        f"final-epoch running acc: online {o:.3f} (>= 0.60), frozen {f:.3f} (<= 0.35), "
        f"ratio {o / f:.1f} (>= 2.5), corpus {n} rows x {2 + n_rot} epochs, "
        f"{elapsed:.1f}s (< 120s)")


def test_criterion_8_determinism(tmp_path):
    from splinefx.cli import main

    cfg = Path(__file__).parent.parent / "configs" / "table1_regression_kan.yaml"
    outputs = []
    for attempt in ("a", "b"):
        out = tmp_path / attempt
        assert main(["run", str(cfg), "--set", f"output_dir={out}"]) == 0
        outputs.append((out / "table1_regression_kan" / "steps.csv").read_bytes())
    ok = outputs[0] == outputs[1]
    assert report("determinism", ok,
                  f"re-run per-step CSV identical: {ok} ({len(outputs[0])} bytes)")
