"""Sequential models (all-spline or all-dense), losses, and prediction rules.

A model owns an ordered stack of homogeneous layers, its loss kind, and a
task kind that fixes the prediction rule (regression value, sign for the
binary +-1 head, argmax for multiclass). Loss and softmax run in real
arithmetic - feedback is host-side, not datapath - and only the gradient
handed to the top layer is quantized, to that layer's output format.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fixedpoint import FixedFormat, exact_mantissa, quantize_array, to_real_array
from .kan import FormatTriple, KanLayer
from .mlp import MlpLayer
from .rng import SplitMix64
from .spline import GridSpec
from .trainer import OpCounter

__all__ = [
    "Model",
    "loss_and_grad",
    "classify_binary",
    "classify_multiclass",
    "make_kan",
    "make_mlp",
]

LOSS_KINDS = ("squared_error", "softmax_cross_entropy", "hinge")
TASK_KINDS = ("regression", "binary", "multiclass")


def loss_and_grad(kind: str, y_hat: np.ndarray, target) -> tuple[float, np.ndarray]:
    """Instantaneous loss and its gradient w.r.t. the model output."""
    if kind == "squared_error":
        t = np.atleast_1d(np.asarray(target, dtype=np.float64))
        diff = y_hat - t
        return float(np.dot(diff, diff)), 2.0 * diff
    if kind == "hinge":
        t = float(target)
        margin = 1.0 - t * float(y_hat[0])
        if margin > 0.0:
            return margin, np.array([-t])
        return 0.0, np.array([0.0])
    if kind == "softmax_cross_entropy":
        z = y_hat - np.max(y_hat)
        e = np.exp(z)
        p = e / np.sum(e)
        t = int(target)
        g = p.copy()
        g[t] -= 1.0
        return float(-np.log(p[t])), g
    raise ValueError(f"unknown loss {kind!r}; expected one of {LOSS_KINDS}")


def classify_binary(y_hat: float) -> int:
    """Sign rule for the single-output +-1 head; ties go to +1."""
    return 1 if y_hat >= 0.0 else -1


def classify_multiclass(logits: np.ndarray) -> int:
    """Argmax with lowest-index tie-break."""
    return int(np.argmax(logits))


def _convert(h, from_fmt: FixedFormat, to_fmt: FixedFormat):
    """Re-quantize mantissas between layer boundary formats."""
    if from_fmt == to_fmt:
        return h
    return quantize_array(to_real_array(h, from_fmt), to_fmt)


class Model:
    def __init__(self, layers: list, loss_kind: str = "squared_error",
                 task: str = "regression", descriptor: str = ""):
        if not layers:
            raise ValueError("model needs at least one layer")
        for a, b in zip(layers, layers[1:]):
            if a.d_out != b.d_in:
                raise ValueError(f"adjacent layer dims incompatible: {a.d_out} -> {b.d_in}")
        if loss_kind not in LOSS_KINDS:
            raise ValueError(f"unknown loss {loss_kind!r}")
        if task not in TASK_KINDS:
            raise ValueError(f"unknown task {task!r}")
        self.layers = layers
        self.loss_kind = loss_kind
        self.task = task
        self.descriptor = descriptor
        self.counter = OpCounter()
        for layer in layers:
            layer.counter = self.counter

    @property
    def d_in(self) -> int:
        return self.layers[0].d_in

    @property
    def d_out(self) -> int:
        return self.layers[-1].d_out

    @property
    def is_fixed(self) -> bool:
        return self.layers[0].formats is not None

    def param_count(self) -> int:
        return sum(layer.param_count() for layer in self.layers)

    def prepare_lr(self, lr: float) -> list:
        """Quantize the learning rate once, to each layer's weight format."""
        out = []
        for layer in self.layers:
            if layer.formats is None:
                out.append(float(lr))
            else:
                out.append(exact_mantissa(lr, layer.formats.weight_t))
        return out

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Quantize the input, chain layer forwards, return real outputs."""
        x = np.asarray(x, dtype=np.float64)
        h = self.layers[0].quantize_input(x)
        prev = self.layers[0]
        for layer in self.layers:
            if layer.formats is not None and layer is not self.layers[0]:
                h = _convert(h, prev.formats.output_t, layer.formats.input_t)
            h = layer.forward(h)
            prev = layer
        return np.atleast_1d(self.layers[-1].output_real(h))

    def summarize(self, y_hat: np.ndarray, target) -> tuple[float, bool | None]:
        """Scalar prediction for logging plus a correctness flag (None for regression)."""
        if self.task == "binary":
            pred = classify_binary(float(y_hat[0]))
            return float(pred), pred == int(target)
        if self.task == "multiclass":
            pred = classify_multiclass(y_hat)
            return float(pred), pred == int(target)
        return float(y_hat[0]), None

    def train_step(self, x: np.ndarray, target, lrs: list) -> tuple[float, float, bool | None]:
        """One prequential step: predict, then a single in-place update.

        The prediction is taken before the target enters any computation.
        Returns (loss, logged prediction, correctness flag).
        """
        y_hat = self.predict(x)
        pred, correct = self.summarize(y_hat, target)
        loss, g = loss_and_grad(self.loss_kind, y_hat, target)
        last = self.layers[-1]
        if last.formats is not None:
            g = quantize_array(g, last.formats.output_t)
        nxt = None
        for idx in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[idx]
            if nxt is not None and layer.formats is not None:
                g = _convert(g, nxt.formats.input_t, layer.formats.output_t)
            g = layer.backward_update(g, lrs[idx])
            nxt = layer
        return loss, pred, correct


def _layer_seeds(seed: int, n: int) -> list[int]:
    rng = SplitMix64(seed)
    return [rng.next_u64() for _ in range(n)]


def _as_triple(fmt) -> FormatTriple | None:
    if fmt is None or isinstance(fmt, FormatTriple):
        return fmt
    return FormatTriple.uniform(fmt)


def make_kan(dims: list[int], grid_size: int = 10, spline_order: int = 2,
             lut_bits: int = 8, grid_range=(-1.0, 1.0), fmt=None,
             init_scale: float = 0.1, seed: int = 0,
             loss_kind: str = "squared_error", task: str = "regression") -> Model:
    """Spline-layer stack; grid_range is one (lo, hi) pair or one per layer."""
    n_layers = len(dims) - 1
    if n_layers < 1:
        raise ValueError("dims must list at least input and output widths")
    ranges = grid_range if isinstance(grid_range[0], (list, tuple)) else [grid_range] * n_layers
    if len(ranges) != n_layers:
        raise ValueError(f"need one grid range per layer ({n_layers}), got {len(ranges)}")
    triple = _as_triple(fmt)
    seeds = _layer_seeds(seed, n_layers)
    layers = []
    for li in range(n_layers):
        lo, hi = ranges[li]
        grid = GridSpec(x_min=float(lo), x_max=float(hi), G=grid_size, p=spline_order, F=lut_bits)
        layers.append(KanLayer(dims[li], dims[li + 1], grid, formats=triple,
                               init_scale=init_scale, seed=seeds[li]))
    # capacity and precision live in their own summary columns, so the
    # descriptor names only the architecture family
    return Model(layers, loss_kind=loss_kind, task=task,
                 descriptor="kan-" + "x".join(str(d) for d in dims))


def make_mlp(dims: list[int], activation: str = "relu", fmt=None, seed: int = 0,
             bias: bool = True, loss_kind: str = "squared_error",
             task: str = "regression") -> Model:
    """Dense stack: hidden layers use `activation`, the output layer is linear."""
    n_layers = len(dims) - 1
    if n_layers < 1:
        raise ValueError("dims must list at least input and output widths")
    triple = _as_triple(fmt)
    seeds = _layer_seeds(seed, n_layers)
    layers = []
    for li in range(n_layers):
        act = activation if li < n_layers - 1 else "linear"
        layers.append(MlpLayer(dims[li], dims[li + 1], activation=act,
                               formats=triple, seed=seeds[li], bias=bias))
    return Model(layers, loss_kind=loss_kind, task=task,
                 descriptor="mlp-" + "x".join(str(d) for d in dims) + f"-{activation}")
