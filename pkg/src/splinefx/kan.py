"""Spline-lookup layer with sparse, index-driven training updates.

Each edge (o, i) carries a learnable univariate spline stored as G+p
coefficients on a uniform grid. A forward pass touches only the s = p+1
active coefficients per edge selected by the cached (cell, bin) context,
and the SGD step rewrites exactly those coefficients, so per-sample
update work is d_in * d_out * s regardless of G.

Fixed-point mode keeps coefficients, table entries, and activations as
int64 mantissas; float mode (formats=None) runs the same loops in IEEE
double with the basis evaluated analytically at the continuous in-cell
coordinate. Supported widths in fixed mode: W <= 21.

A layer instance is single-writer: one sample's forward/backward pair at a
time (the cached context is per-instance state). Distinct instances train
concurrently without coordination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .fixedpoint import FixedFormat, quantize_array, to_real_array
from .rng import SplitMix64
from .spline import GridSpec, build_basis_lut

__all__ = ["FormatTriple", "KanLayer", "ROM_FRAC_BITS"]

# Basis tables are compile-time ROM constants, not datapath values; they get
# a fraction-rich word independent of the (often integer-heavy) weight format
# so the stored partition of unity survives quantization.
ROM_FRAC_BITS = 16


@dataclass(frozen=True)
class FormatTriple:
    """Independent datapath formats: inputs, parameters/accumulators, outputs."""

    input_t: FixedFormat
    weight_t: FixedFormat
    output_t: FixedFormat

    @classmethod
    def uniform(cls, fmt: FixedFormat) -> "FormatTriple":
        return cls(fmt, fmt, fmt)


class KanLayer:
    def __init__(self, d_in: int, d_out: int, grid: GridSpec,
                 formats: FormatTriple | None = None,
                 init_scale: float = 0.1, seed: int = 0, counter=None):
        if d_in < 1 or d_out < 1:
            raise ValueError("layer dimensions must be positive")
        self.d_in = d_in
        self.d_out = d_out
        self.grid = grid
        self.formats = formats
        self.counter = counter
        self.lut = build_basis_lut(grid.p, grid.F)
        self._has_ctx = False
        self._ctx_k = np.zeros(d_in, dtype=np.int64)

        rng = SplitMix64(seed)
        coeffs = np.empty((d_out, d_in, grid.coeff_count))
        for o in range(d_out):
            for i in range(d_in):
                for c in range(grid.coeff_count):
                    coeffs[o, i, c] = rng.uniform(-init_scale, init_scale)

        if formats is None:
            self.ws = coeffs
            self._ctx_xi = np.zeros(d_in)
        else:
            fi, fw, fo = formats.input_t, formats.weight_t, formats.output_t
            if not grid.locate_scale_fits_int64(fi):
                raise ValueError(
                    "grid bounds are not dyadic-friendly enough for exact integer "
                    "indexing; choose bounds with small binary expansions")
            self.ws = quantize_array(coeffs, fw)
            # the derivative table is pre-scaled to d/dx (unit slope times
            # 1/H) before tabulation: ROM holds compiled constants
            rom = float(1 << ROM_FRAC_BITS)
            self._lutb_m = np.rint(self.lut.b * rom).astype(np.int64)
            self._lutdb_m = np.rint(self.lut.db / grid.H * rom).astype(np.int64)
            self._n1, self._n0, self._dd = grid.locate_scale(fi)
            self._tmax = grid.G * grid.n_bins - 1
            self._sh_wb = ROM_FRAC_BITS
            self._sh_yo = fw.frac_bits - fo.frac_bits
            self._sh_go = fo.frac_bits
            self._sh_upd = fo.frac_bits + ROM_FRAC_BITS
            self._sh_gi = fw.frac_bits - fi.frac_bits
            self._ctx_u = np.zeros(d_in, dtype=np.int64)

    @property
    def is_fixed(self) -> bool:
        return self.formats is not None

    def param_count(self) -> int:
        """Parameter budget per the G+s convention: d_in * d_out * (G + s)."""
        return self.d_in * self.d_out * (self.grid.G + self.grid.s)

    def coeffs_real(self) -> np.ndarray:
        if self.formats is None:
            return self.ws.copy()
        return to_real_array(self.ws, self.formats.weight_t)

    def set_coeffs_real(self, coeffs: np.ndarray) -> None:
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.shape != (self.d_out, self.d_in, self.grid.coeff_count):
            raise ValueError(f"expected coefficient shape "
                             f"{(self.d_out, self.d_in, self.grid.coeff_count)}, got {coeffs.shape}")
        if self.formats is None:
            self.ws = coeffs.copy()
        else:
            self.ws = quantize_array(coeffs, self.formats.weight_t)

    def quantize_input(self, x: np.ndarray) -> np.ndarray:
        if self.formats is None:
            return np.asarray(x, dtype=np.float64)
        return quantize_array(x, self.formats.input_t)

    def output_real(self, y) -> np.ndarray:
        if self.formats is None:
            return y
        return to_real_array(y, self.formats.output_t)

    def forward(self, x: np.ndarray) -> np.ndarray:
        """One sample: mantissa vector (fixed) or float vector -> outputs.

        Caches the (cell, bin) context per input coordinate for the
        matching backward call.
        """
        if x.shape != (self.d_in,):
            raise ValueError(f"expected input shape ({self.d_in},), got {x.shape}")
        y = np.empty(self.d_out, dtype=np.int64 if self.is_fixed else np.float64)
        if self.is_fixed:
            fw, fo = self.formats.weight_t, self.formats.output_t
            _kernels.kan_forward_fx(
                self.ws, x, self._lutb_m, self._n1, self._n0, self._dd,
                self.grid.F, self._tmax, self.grid.p,
                self._sh_wb, fw.m_min, fw.m_max,
                self._sh_yo, fo.m_min, fo.m_max,
                self._ctx_k, self._ctx_u, y)
        else:
            _kernels.kan_forward_fl(
                self.ws, x, self.grid.x_min, self.grid.x_max,
                self.grid.G, self.grid.p, self._ctx_k, self._ctx_xi, y)
        self._has_ctx = True
        if self.counter is not None:
            self.counter.forward_mults += self.d_in * self.d_out * self.grid.s
        return y

    def backward_update(self, g: np.ndarray, lr) -> np.ndarray:
        """Sparse in-place SGD step plus downstream gradient.

        Coefficients move by -lr * g_o * B_r(u_i) on the active window only;
        the returned dL/dx uses pre-update coefficients and the derivative
        table. `lr` is a weight_t mantissa in fixed mode, a float otherwise.
        """
        if not self._has_ctx:
            raise RuntimeError("backward_update called without a matching forward")
        if g.shape != (self.d_out,):
            raise ValueError(f"expected gradient shape ({self.d_out},), got {g.shape}")
        gx = np.empty(self.d_in, dtype=np.int64 if self.is_fixed else np.float64)
        if self.is_fixed:
            fi, fw = self.formats.input_t, self.formats.weight_t
            _kernels.kan_backward_fx(
                self.ws, g, lr, self._lutb_m, self._lutdb_m,
                self._ctx_k, self._ctx_u, self.grid.p,
                self._sh_go, self._sh_wb, self._sh_upd, fw.m_min, fw.m_max,
                self._sh_gi, fi.m_min, fi.m_max, gx)
        else:
            _kernels.kan_backward_fl(
                self.ws, g, lr, 1.0 / self.grid.H,
                self._ctx_k, self._ctx_xi, self.grid.p, gx)
        self._has_ctx = False
        if self.counter is not None:
            n = self.d_in * self.d_out * self.grid.s
            self.counter.update_mults += n
            self.counter.backward_mults += n
        return gx
