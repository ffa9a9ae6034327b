"""Bit-accurate emulation of fully-online fixed-point training for
spline-lookup (KAN) and MLP networks, with non-stationary stream
benchmarks and an operation-count cost model."""

from .fixedpoint import FixedFormat, FixedNum, fx_add, fx_mul, parse_format, quantize, to_real
from .kan import FormatTriple, KanLayer
from .mlp import MlpLayer, activation_deriv, activation_fn
from .model import Model, classify_binary, classify_multiclass, loss_and_grad, make_kan, make_mlp
from .spline import BasisLut, CellIndex, GridSpec, build_basis_lut, eval_basis, eval_deriv, locate
from .streams import (DigitsStreamConfig, StreamSample, XorStreamConfig, digits_stream,
                      regression_stream, rotate_image, rotating_xor_stream)
from .trainer import OpCounter, RunLog, run_online, running_accuracy, sweep, update_cost_ratio

__version__ = "0.1.0"
