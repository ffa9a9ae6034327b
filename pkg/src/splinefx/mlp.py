"""Dense baseline layer with hardware-faithful online SGD semantics.

Forward computes y = act(W x + b), rounding once per accumulation step in
fixed mode; backward applies in-place SGD (bias, then weights) and returns
the downstream gradient from the pre-update weights. Every weight with
nonzero input and nonzero dz moves on every step - the dense contrast to
the spline layer's sparse window. Same single-writer contract per instance
as the spline layer.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .fixedpoint import quantize_array, to_real_array
from .kan import FormatTriple
from .rng import SplitMix64

__all__ = ["MlpLayer", "ACTIVATIONS", "activation_fn", "activation_deriv"]

ACTIVATIONS = {
    "linear": _kernels.ACT_LINEAR,
    "relu": _kernels.ACT_RELU,
    "hard_tanh": _kernels.ACT_HARD_TANH,
    "hard_silu": _kernels.ACT_HARD_SILU,
}


def activation_fn(kind: str, z: float) -> float:
    """Reference scalar activations (real arithmetic)."""
    if kind == "linear":
        return z
    if kind == "relu":
        return max(0.0, z)
    if kind == "hard_tanh":
        return min(1.0, max(-1.0, z))
    if kind == "hard_silu":
        return z * min(6.0, max(0.0, z + 3.0)) / 6.0
    raise ValueError(f"unknown activation {kind!r}")


def activation_deriv(kind: str, z: float) -> float:
    """Derivatives with the fixed kink conventions relu'(0)=0, hard_tanh'(+-1)=0."""
    if kind == "linear":
        return 1.0
    if kind == "relu":
        return 1.0 if z > 0 else 0.0
    if kind == "hard_tanh":
        return 1.0 if -1.0 < z < 1.0 else 0.0
    if kind == "hard_silu":
        return min(1.0, max(0.0, z / 3.0 + 0.5))
    raise ValueError(f"unknown activation {kind!r}")


class MlpLayer:
    def __init__(self, d_in: int, d_out: int, activation: str = "relu",
                 formats: FormatTriple | None = None, seed: int = 0,
                 bias: bool = True, counter=None):
        if d_in < 1 or d_out < 1:
            raise ValueError("layer dimensions must be positive")
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}; expected one of {sorted(ACTIVATIONS)}")
        self.d_in = d_in
        self.d_out = d_out
        self.activation = activation
        self._act = ACTIVATIONS[activation]
        self.formats = formats
        self.bias = bias
        self.counter = counter
        self._has_ctx = False

        # same per-layer scale as the common uniform schemes: U(-k, k), k = 1/sqrt(d_in)
        rng = SplitMix64(seed)
        k = 1.0 / np.sqrt(d_in)
        w = np.empty((d_out, d_in))
        for o in range(d_out):
            for i in range(d_in):
                w[o, i] = rng.uniform(-k, k)
        b = np.zeros(d_out)
        if bias:
            for o in range(d_out):
                b[o] = rng.uniform(-k, k)

        if formats is None:
            self.W = w
            self.b = b
            self._ctx_x = np.zeros(d_in)
            self._ctx_z = np.zeros(d_out)
        else:
            fi, fw, fo = formats.input_t, formats.weight_t, formats.output_t
            self.W = quantize_array(w, fw)
            self.b = quantize_array(b, fw)
            self._ctx_x = np.zeros(d_in, dtype=np.int64)
            self._ctx_z = np.zeros(d_out, dtype=np.int64)
            self._sh_wx = fi.frac_bits
            self._sh_zy = fw.frac_bits - fo.frac_bits
            self._sh_go = fo.frac_bits
            self._sh_gi = fw.frac_bits - fi.frac_bits
            # reciprocals for hard_silu are compiled fixed-point constants
            self._inv6_m = int(quantize_array(np.array(1.0 / 6.0), fw))
            self._inv3_m = int(quantize_array(np.array(1.0 / 3.0), fw))

    @property
    def is_fixed(self) -> bool:
        return self.formats is not None

    def param_count(self) -> int:
        return self.d_in * self.d_out + (self.d_out if self.bias else 0)

    def weights_real(self) -> np.ndarray:
        return self.W.copy() if self.formats is None else to_real_array(self.W, self.formats.weight_t)

    def biases_real(self) -> np.ndarray:
        return self.b.copy() if self.formats is None else to_real_array(self.b, self.formats.weight_t)

    def set_params_real(self, W: np.ndarray, b: np.ndarray) -> None:
        W = np.asarray(W, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if W.shape != (self.d_out, self.d_in) or b.shape != (self.d_out,):
            raise ValueError("parameter shape mismatch")
        if self.formats is None:
            self.W, self.b = W.copy(), b.copy()
        else:
            fw = self.formats.weight_t
            self.W, self.b = quantize_array(W, fw), quantize_array(b, fw)

    def quantize_input(self, x: np.ndarray) -> np.ndarray:
        if self.formats is None:
            return np.asarray(x, dtype=np.float64)
        return quantize_array(x, self.formats.input_t)

    def output_real(self, y) -> np.ndarray:
        if self.formats is None:
            return y
        return to_real_array(y, self.formats.output_t)

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.shape != (self.d_in,):
            raise ValueError(f"expected input shape ({self.d_in},), got {x.shape}")
        y = np.empty(self.d_out, dtype=np.int64 if self.is_fixed else np.float64)
        if self.is_fixed:
            fw, fo = self.formats.weight_t, self.formats.output_t
            self._ctx_x[:] = x
            _kernels.mlp_forward_fx(
                self.W, self.b, x, self._act, fw.frac_bits, self._inv6_m,
                self._sh_wx, fw.m_min, fw.m_max,
                self._sh_zy, fo.m_min, fo.m_max,
                self._ctx_z, y)
        else:
            self._ctx_x[:] = x
            _kernels.mlp_forward_fl(self.W, self.b, x, self._act, self._ctx_z, y)
        self._has_ctx = True
        if self.counter is not None:
            self.counter.forward_mults += self.d_in * self.d_out
        return y

    def backward_update(self, g: np.ndarray, lr) -> np.ndarray:
        """Dense in-place SGD step; downstream gradient uses pre-update weights."""
        if not self._has_ctx:
            raise RuntimeError("backward_update called without a matching forward")
        if g.shape != (self.d_out,):
            raise ValueError(f"expected gradient shape ({self.d_out},), got {g.shape}")
        gx = np.empty(self.d_in, dtype=np.int64 if self.is_fixed else np.float64)
        if self.is_fixed:
            fi, fw, fo = self.formats.input_t, self.formats.weight_t, self.formats.output_t
            _kernels.mlp_backward_fx(
                self.W, self.b, g, self._ctx_x, self._ctx_z, self._act,
                lr, fw.frac_bits, self._inv3_m,
                self._sh_go, fw.m_min, fw.m_max,
                self._sh_wx, self._sh_gi, fi.m_min, fi.m_max,
                fo.m_min, fo.m_max, self.bias, gx)
        else:
            _kernels.mlp_backward_fl(
                self.W, self.b, g, self._ctx_x, self._ctx_z, self._act, lr,
                self.bias, gx)
        self._has_ctx = False
        if self.counter is not None:
            self.counter.update_mults += self.d_in * self.d_out
            self.counter.backward_mults += self.d_in * self.d_out
        return gx
