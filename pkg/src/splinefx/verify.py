"""Executable property checks for the core numerical claims.

Each check exercises the real engine paths (layers, kernels, fixed-point
ops) against independently computed references: closed-form basis sums,
coefficient-range envelopes, finite differences, exact rational
arithmetic. `run_all` returns one result per check; the CLI `verify`
subcommand prints them as a pass/fail table.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fixedpoint import FixedFormat, FixedNum, fx_add, fx_mul, quantize
from .kan import FormatTriple, KanLayer
from .model import loss_and_grad, make_kan, make_mlp
from .mlp import MlpLayer
from .spline import GridSpec, build_basis_lut
from .trainer import update_cost_ratio

__all__ = ["CheckResult", "run_all", "ALL_CHECKS"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def check_partition_of_unity() -> CheckResult:
    """Basis values at every bin sum to 1 within 2^-20 for orders 0..3."""
    worst = 0.0
    for p in range(4):
        lut = build_basis_lut(p, 8)
        worst = max(worst, float(np.max(np.abs(lut.b.sum(axis=0) - 1.0))))
    return CheckResult("partition_of_unity", worst <= 2.0**-20,
                       f"max|sum(B)-1| = {worst:.3e} (bound 2^-20, p in 0..3, F=8)")


def check_activation_bounds(trials: int = 10_000) -> CheckResult:
    """Single-edge outputs stay inside [min coeff, max coeff] for any input.

    Float mode must show zero violations (beyond double-precision dust);
    fixed-point mode may exceed the envelope by at most one quantization
    step of the weight format.
    """
    rng = np.random.default_rng(20240501)
    fmt = FixedFormat(7, 3)
    delta = fmt.delta
    worst_float = 0.0
    worst_fixed = 0.0
    for p in range(4):
        grid = GridSpec(-1.0, 1.0, G=8, p=p, F=8)
        lay_f = KanLayer(1, 1, grid, formats=None, seed=1)
        lay_q = KanLayer(1, 1, grid, formats=FormatTriple.uniform(fmt), seed=1)
        n = grid.coeff_count
        for _ in range(trials):
            coeffs = rng.uniform(-2.0, 2.0, size=(1, 1, n))
            x = rng.uniform(-3.0, 3.0, size=1)  # includes out-of-grid inputs
            lay_f.set_coeffs_real(coeffs)
            y = float(lay_f.forward(x)[0])
            lo, hi = coeffs.min(), coeffs.max()
            worst_float = max(worst_float, lo - y, y - hi)
            lay_q.set_coeffs_real(coeffs)
            cq = lay_q.coeffs_real()
            yq = float(lay_q.output_real(lay_q.forward(lay_q.quantize_input(x)))[0])
            worst_fixed = max(worst_fixed, cq.min() - yq, yq - cq.max())
    ok = worst_float <= 1e-12 and worst_fixed <= delta + 1e-12
    return CheckResult(
        "activation_bounds", ok,
        f"float overshoot {worst_float:.3e} (=0 required), "
        f"fixed overshoot {worst_fixed:.3e} (bound delta={delta})")


def check_gradient_bounds(trials: int = 10_000) -> CheckResult:
    """Coefficient gradients never exceed the upstream error magnitude."""
    rng = np.random.default_rng(20240502)
    grid = GridSpec(-1.0, 1.0, G=8, p=2, F=8)
    layer = KanLayer(2, 3, grid, formats=None, seed=3)
    lr = 0.25
    worst = -np.inf
    for _ in range(trials):
        x = rng.uniform(-1.5, 1.5, size=2)
        g = rng.uniform(-2.0, 2.0, size=3)
        before = layer.ws.copy()
        layer.forward(x)
        layer.backward_update(g, lr)
        grads = (before - layer.ws) / lr  # dL/dw recovered from the SGD move
        margin = np.abs(grads).max(axis=(1, 2)) - np.abs(g)  # per output o
        worst = max(worst, float(margin.max()))
    ok = worst <= 1e-12
    return CheckResult("kan_gradient_bound", ok,
                       f"max(|dL/dw| - |g|) = {worst:.3e} over {trials} trials (<= 0 required)")


def check_mlp_gradient_scale(trials: int = 200) -> CheckResult:
    """First-layer weight gradients of a linear layer scale exactly with the input."""
    rng = np.random.default_rng(20240503)
    worst = 0.0
    lr = 0.5
    for _ in range(trials):
        layer = MlpLayer(4, 3, activation="linear", formats=None,
                         seed=int(rng.integers(1 << 40)))
        x = rng.uniform(-1.0, 1.0, size=4)
        g = rng.uniform(-1.0, 1.0, size=3)
        c = float(rng.uniform(0.3, 3.0))

        def grad_for(xs, lay=layer):
            w0 = lay.W.copy()
            lay.forward(xs)
            lay.backward_update(g, lr)
            gw = (w0 - lay.W) / lr
            lay.set_params_real(w0, np.zeros(3))
            return gw

        g1 = grad_for(x)
        g2 = grad_for(c * x)
        ratio = np.linalg.norm(g2) / np.linalg.norm(g1)
        worst = max(worst, abs(ratio - c) / c)
    return CheckResult("mlp_gradient_scale", worst <= 1e-10,
                       f"max rel deviation of norm ratio from c: {worst:.3e} (bound 1e-10)")


def check_cost_ratio() -> CheckResult:
    """Measured update-op ratios match s/(G+s) exactly; invariant in G."""
    kan = make_kan([1, 1], grid_size=10, spline_order=2)
    mlp = make_mlp([13, 1], activation="linear", bias=False)
    r1 = update_cost_ratio(kan, mlp, probe_samples=8)
    kan0 = make_kan([1, 1], grid_size=5, spline_order=0)
    mlp0 = make_mlp([6, 1], activation="linear", bias=False)
    r2 = update_cost_ratio(kan0, mlp0, probe_samples=8)
    per_sample = []
    for G in (5, 10, 20, 40):
        m = make_kan([2, 3], grid_size=G, spline_order=2)
        lrs = m.prepare_lr(0.0)
        for _ in range(4):
            m.train_step(np.zeros(2), np.zeros(3), lrs)
        per_sample.append(m.counter.update_mults // 4)
    invariant = len(set(per_sample)) == 1
    ok = r1 == Fraction(3, 13) and r2 == Fraction(1, 6) and invariant
    return CheckResult(
        "update_cost_ratio", ok,
        f"(G=10,s=3): {r1} (want 3/13); (G=5,s=1): {r2} (want 1/6); "
        f"per-sample update ops across G sweep: {per_sample}")


def _fd_loss_grad(model, x, target, h):
    """Central finite differences of the loss w.r.t. each input coordinate."""
    fd = np.zeros_like(x)
    for j in range(len(x)):
        xp = x.copy()
        xp[j] += h
        lp, _ = loss_and_grad(model.loss_kind, model.predict(xp), target)
        xm = x.copy()
        xm[j] -= h
        lm, _ = loss_and_grad(model.loss_kind, model.predict(xm), target)
        fd[j] = (lp - lm) / (2 * h)
    return fd


def _backward_input_grad(model, x, target):
    y = model.predict(x)
    _, g = loss_and_grad(model.loss_kind, y, target)
    lrs = model.prepare_lr(0.0)  # lr=0: gradients flow, parameters stay put
    for idx in range(len(model.layers) - 1, -1, -1):
        g = model.layers[idx].backward_update(g, lrs[idx])
    return g


def _kan_interior_point(rng, grid: GridSpec, d):
    """Coordinates at least 2 table bins away from any cell boundary."""
    margin = 2.0 / grid.n_bins
    while True:
        x = rng.uniform(grid.x_min * 0.95, grid.x_max * 0.95, size=d)
        t = (x - grid.x_min) / grid.H
        frac = t - np.floor(t)
        if np.all((frac > margin) & (frac < 1.0 - margin)):
            return x


def check_gradient_correctness(points: int = 100) -> CheckResult:
    """End-to-end backward vs central differences in float mode (<= 1e-4)."""
    rng = np.random.default_rng(20240504)
    worst = 0.0

    kan = make_kan([2, 7, 1], grid_size=10, spline_order=2, seed=11)
    target = np.array([0.37])
    done = 0
    while done < points:
        x = _kan_interior_point(rng, kan.layers[0].grid, 2)
        fd = _fd_loss_grad(kan, x, target, h=1e-4)
        if np.min(np.abs(fd)) < 1e-3:
            continue  # degenerate direction: relative error is meaningless
        bg = _backward_input_grad(kan, x, target)
        worst = max(worst, float(np.max(np.abs(bg - fd) / np.abs(fd))))
        done += 1

    mlp = make_mlp([2, 20, 8, 5, 1], activation="relu", seed=12)
    done = 0
    while done < points:
        x = rng.uniform(-1.0, 1.0, size=2)
        mlp.predict(x)
        zmin = min(float(np.min(np.abs(layer._ctx_z))) for layer in mlp.layers[:-1])
        if zmin < 1e-3:
            continue  # too close to a relu kink for finite differences
        fd = _fd_loss_grad(mlp, x, target, h=1e-5)
        if np.min(np.abs(fd)) < 1e-3:
            continue
        bg = _backward_input_grad(mlp, x, target)
        worst = max(worst, float(np.max(np.abs(bg - fd) / np.abs(fd))))
        done += 1

    return CheckResult("gradient_correctness", worst <= 1e-4,
                       f"max relative error vs central differences: {worst:.3e} (bound 1e-4)")


def _oracle_quantize_m(value: Fraction, fmt: FixedFormat) -> int:
    """Independent reference: exact rational scaling, half-even, clip."""
    m = round(value * (1 << fmt.frac_bits))
    return max(fmt.m_min, min(fmt.m_max, m))


def check_fixedpoint_oracle(cases: int = 100_000) -> CheckResult:
    """Scalar ops agree with exact rational references on random operands."""
    rng = np.random.default_rng(20240505)
    formats = [FixedFormat(6, 2), FixedFormat(7, 3), FixedFormat(10, 3), FixedFormat(16, 4)]
    bad = 0
    checked = 0
    for fmt in formats:
        d = Fraction(1, 1 << fmt.frac_bits)
        ma = rng.integers(fmt.m_min, fmt.m_max + 1, size=cases)
        mb = rng.integers(fmt.m_min, fmt.m_max + 1, size=cases)
        zs = rng.uniform(float(fmt.r_neg) * 1.5, float(fmt.r_pos) * 1.5, size=cases)
        for i in range(cases):
            a = FixedNum(int(ma[i]), fmt)
            b = FixedNum(int(mb[i]), fmt)
            va, vb = Fraction(a.m) * d, Fraction(b.m) * d
            if fx_add(a, b, fmt).m != _oracle_quantize_m(va + vb, fmt):
                bad += 1
            if fx_mul(a, b, fmt).m != _oracle_quantize_m(va * vb, fmt):
                bad += 1
            if quantize(zs[i], fmt).m != _oracle_quantize_m(Fraction(zs[i]), fmt):
                bad += 1
            checked += 3
    return CheckResult("fixedpoint_oracle", bad == 0,
                       f"{bad} mismatches in {checked} op comparisons across {len(formats)} formats")


ALL_CHECKS = [
    check_partition_of_unity,
    check_activation_bounds,
    check_gradient_bounds,
    check_mlp_gradient_scale,
    check_cost_ratio,
    check_gradient_correctness,
    check_fixedpoint_oracle,
]


def run_all() -> list[CheckResult]:
    results = []
    for fn in ALL_CHECKS:
        t0 = time.perf_counter()
        res = fn()
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results
