"""JIT-compiled per-sample kernels for the layer engines.

Fixed-point kernels work on int64 mantissa arrays and follow
per-assignment quantization with round-half-even and saturation, mirroring
how the generated hardware kernels evaluate: a spline edge's sum over its
s-entry active window is one unrolled expression, so it is computed
exactly in wide integers and rounded once at assignment, while the dense
runtime-length loops (a neuron's Wx+b, gradient reductions over outputs)
round once per += step. Products themselves are always exact. A training
run is therefore a deterministic integer program. Wide intermediates bound
the usable width (callers enforce W <= 21).

Float kernels are the IEEE-double ablation mode: same loop structure, no
rounding, and spline bases evaluated analytically at the continuous
in-cell coordinate instead of through the binned table.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Activation codes shared with mlp.py
ACT_LINEAR = 0
ACT_RELU = 1
ACT_HARD_TANH = 2
ACT_HARD_SILU = 3


@njit(inline="always")
def _rq(v, shift, mmin, mmax):
    """Round v / 2^shift half-to-even (exact on ints), then saturate."""
    if shift > 0:
        q = v >> shift  # arithmetic shift == floor
        r = v - (q << shift)
        half = 1 << (shift - 1)
        if r > half or (r == half and (q & 1) != 0):
            q += 1
    elif shift < 0:
        q = v << (-shift)
    else:
        q = v
    if q > mmax:
        q = mmax
    elif q < mmin:
        q = mmin
    return q


@njit(inline="always")
def _sat(v, mmin, mmax):
    if v > mmax:
        return mmax
    if v < mmin:
        return mmin
    return v


# ---------------------------------------------------------------------------
# KAN kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def kan_forward_fx(ws, x, lutb, n1, n0, dd, F, tmax, p,
                   sh_wb, wmin, wmax, sh_yo, omin, omax,
                   k_ctx, u_ctx, y_out):
    d_out = ws.shape[0]
    d_in = ws.shape[1]
    mask = (1 << F) - 1
    for i in range(d_in):
        tm = (x[i] * n1 - n0) // dd
        if tm < 0:
            tm = 0
        elif tm > tmax:
            tm = tmax
        k_ctx[i] = tm >> F
        u_ctx[i] = tm & mask
    for o in range(d_out):
        acc = 0
        for i in range(d_in):
            k = k_ctx[i]
            u = u_ctx[i]
            raw = 0  # exact wide sum over the active window, one rounding
            for r in range(p + 1):
                raw += ws[o, i, k + r] * lutb[r, u]
            phi = _rq(raw, sh_wb, wmin, wmax)
            acc = _sat(acc + phi, wmin, wmax)
        y_out[o] = _rq(acc, sh_yo, omin, omax)


@njit(cache=True)
def kan_backward_fx(ws, g, lr_m, lutb, lutdb, k_ctx, u_ctx, p,
                    sh_go, sh_wb, sh_upd, wmin, wmax, sh_gi, imin, imax, gx_out):
    d_out = ws.shape[0]
    d_in = ws.shape[1]
    # downstream gradient first: it must read pre-update coefficients
    for i in range(d_in):
        k = k_ctx[i]
        u = u_ctx[i]
        acc = 0
        for o in range(d_out):
            raw = 0
            for r in range(p + 1):
                raw += ws[o, i, k + r] * lutdb[r, u]
            inner = _rq(raw, sh_wb, wmin, wmax)
            t2 = _rq(g[o] * inner, sh_go, wmin, wmax)
            acc = _sat(acc + t2, wmin, wmax)
        gx_out[i] = _rq(acc, sh_gi, imin, imax)
    # sparse in-place update of the s active coefficients per edge; the
    # whole -= expression lr*g*B is one assignment, so one rounding
    for o in range(d_out):
        lg = lr_m * g[o]
        for i in range(d_in):
            k = k_ctx[i]
            u = u_ctx[i]
            for r in range(p + 1):
                upd = _rq(lg * lutb[r, u], sh_upd, wmin, wmax)
                ws[o, i, k + r] = _sat(ws[o, i, k + r] - upd, wmin, wmax)


@njit(inline="always")
def _seg_basis(p, xi, out):
    if p == 0:
        out[0] = 1.0
    elif p == 1:
        out[0] = 1.0 - xi
        out[1] = xi
    elif p == 2:
        out[0] = 0.5 * (1.0 - xi) * (1.0 - xi)
        out[1] = 0.5 * (-2.0 * xi * xi + 2.0 * xi + 1.0)
        out[2] = 0.5 * xi * xi
    else:
        out[0] = (1.0 - xi) ** 3 / 6.0
        out[1] = (3.0 * xi**3 - 6.0 * xi * xi + 4.0) / 6.0
        out[2] = (-3.0 * xi**3 + 3.0 * xi * xi + 3.0 * xi + 1.0) / 6.0
        out[3] = xi**3 / 6.0


@njit(inline="always")
def _seg_deriv(p, xi, out):
    if p == 0:
        out[0] = 0.0
    elif p == 1:
        out[0] = -1.0
        out[1] = 1.0
    elif p == 2:
        out[0] = xi - 1.0
        out[1] = 1.0 - 2.0 * xi
        out[2] = xi
    else:
        out[0] = -0.5 * (1.0 - xi) * (1.0 - xi)
        out[1] = 0.5 * (3.0 * xi * xi - 4.0 * xi)
        out[2] = 0.5 * (-3.0 * xi * xi + 2.0 * xi + 1.0)
        out[3] = 0.5 * xi * xi


@njit(cache=True)
def kan_forward_fl(ws, x, x_min, x_max, G, p, k_ctx, xi_ctx, y_out):
    d_out = ws.shape[0]
    d_in = ws.shape[1]
    scale = G / (x_max - x_min)
    basis = np.empty(p + 1)
    for o in range(d_out):
        y_out[o] = 0.0
    for i in range(d_in):
        t = (x[i] - x_min) * scale
        if t < 0.0:
            t = 0.0
        k = int(t)
        if k > G - 1:
            k = G - 1
        xi = t - k
        if xi > 1.0:
            xi = 1.0
        k_ctx[i] = k
        xi_ctx[i] = xi
        _seg_basis(p, xi, basis)
        for o in range(d_out):
            acc = 0.0
            for r in range(p + 1):
                acc += ws[o, i, k + r] * basis[r]
            y_out[o] += acc


@njit(cache=True)
def kan_backward_fl(ws, g, lr, inv_h, k_ctx, xi_ctx, p, gx_out):
    d_out = ws.shape[0]
    d_in = ws.shape[1]
    basis = np.empty(p + 1)
    deriv = np.empty(p + 1)
    for i in range(d_in):
        k = k_ctx[i]
        _seg_deriv(p, xi_ctx[i], deriv)
        acc = 0.0
        for o in range(d_out):
            inner = 0.0
            for r in range(p + 1):
                inner += ws[o, i, k + r] * deriv[r]
            acc += g[o] * inner
        gx_out[i] = acc * inv_h
    for i in range(d_in):
        k = k_ctx[i]
        _seg_basis(p, xi_ctx[i], basis)
        for o in range(d_out):
            sg = lr * g[o]
            for r in range(p + 1):
                ws[o, i, k + r] -= sg * basis[r]


# ---------------------------------------------------------------------------
# MLP kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def mlp_forward_fx(W, b, x, act, fw, inv6_m,
                   sh_wx, wmin, wmax, sh_zy, omin, omax,
                   z_ctx, y_out):
    d_out = W.shape[0]
    d_in = W.shape[1]
    one = 1 << fw
    for o in range(d_out):
        # running dense accumulation: one rounding per += assignment
        acc = b[o]
        for i in range(d_in):
            acc = _rq((acc << sh_wx) + W[o, i] * x[i], sh_wx, wmin, wmax)
        z_ctx[o] = acc
        if act == 1:  # relu
            v = acc if acc > 0 else 0
        elif act == 2:  # hard_tanh
            v = _sat(acc, -one, one)
        elif act == 3:  # hard_silu: z * clip(z+3, 0, 6) * (1/6)
            t = _sat(acc + 3 * one, 0, 6 * one)
            zt = _rq(acc * t, fw, wmin, wmax)
            v = _rq(zt * inv6_m, fw, wmin, wmax)
        else:  # linear
            v = acc
        y_out[o] = _rq(v, sh_zy, omin, omax)


@njit(cache=True)
def mlp_backward_fx(W, b, g, x_ctx, z_ctx, act, lr_m, fw, inv3_m,
                    sh_go, wmin, wmax, sh_xw, sh_gi, imin, imax,
                    omin, omax, use_bias, gx_out):
    d_out = W.shape[0]
    d_in = W.shape[1]
    one = 1 << fw
    half = 1 << (fw - 1)
    dz = np.empty(d_out, dtype=np.int64)
    for o in range(d_out):
        z = z_ctx[o]
        if act == 1:
            dz[o] = g[o] if z > 0 else 0
        elif act == 2:
            dz[o] = g[o] if -one < z < one else 0
        elif act == 3:
            d = _sat(_rq(z * inv3_m, fw, wmin, wmax) + half, 0, one)
            dz[o] = _rq(g[o] * d, fw, omin, omax)
        else:
            dz[o] = g[o]
    # downstream gradient reads W before the in-place update, which makes it
    # identical to the bias -> weights -> gradient-from-old-weights ordering
    for i in range(d_in):
        acc = 0
        for o in range(d_out):
            acc = _rq((acc << sh_go) + dz[o] * W[o, i], sh_go, wmin, wmax)
        gx_out[i] = _rq(acc, sh_gi, imin, imax)
    # each -= is one assignment: bias rounds lr*dz once, weights round
    # the full lr*dz*x product once
    for o in range(d_out):
        ld = lr_m * dz[o]
        if use_bias:
            sd = _rq(ld, sh_go, wmin, wmax)
            b[o] = _sat(b[o] - sd, wmin, wmax)
        for i in range(d_in):
            upd = _rq(ld * x_ctx[i], sh_go + sh_xw, wmin, wmax)
            W[o, i] = _sat(W[o, i] - upd, wmin, wmax)


@njit(cache=True)
def mlp_forward_fl(W, b, x, act, z_ctx, y_out):
    d_out = W.shape[0]
    d_in = W.shape[1]
    for o in range(d_out):
        acc = b[o]
        for i in range(d_in):
            acc += W[o, i] * x[i]
        z_ctx[o] = acc
        if act == 1:
            v = acc if acc > 0.0 else 0.0
        elif act == 2:
            v = min(1.0, max(-1.0, acc))
        elif act == 3:
            v = acc * min(6.0, max(0.0, acc + 3.0)) / 6.0
        else:
            v = acc
        y_out[o] = v


@njit(cache=True)
def mlp_backward_fl(W, b, g, x_ctx, z_ctx, act, lr, use_bias, gx_out):
    d_out = W.shape[0]
    d_in = W.shape[1]
    dz = np.empty(d_out)
    for o in range(d_out):
        z = z_ctx[o]
        if act == 1:
            dz[o] = g[o] if z > 0.0 else 0.0
        elif act == 2:
            dz[o] = g[o] if -1.0 < z < 1.0 else 0.0
        elif act == 3:
            dz[o] = g[o] * min(1.0, max(0.0, z / 3.0 + 0.5))
        else:
            dz[o] = g[o]
    for i in range(d_in):
        acc = 0.0
        for o in range(d_out):
            acc += dz[o] * W[o, i]
        gx_out[i] = acc
    for o in range(d_out):
        sd = lr * dz[o]
        if use_bias:
            b[o] -= sd
        for i in range(d_in):
            W[o, i] -= sd * x_ctx[i]
