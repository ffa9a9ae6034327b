"""Saturated fixed-point arithmetic with exact integer mantissas.

A number in format <W,I> (W total bits, I integer bits, both counting the
sign bit) is stored as a signed mantissa m with real value m * 2^-(W-I).
The representable range is [-2^(I-1), 2^(I-1) - delta]. Every arithmetic
result is rounded half-to-even and saturated into its destination format,
matching convergent-rounding / saturating vendor fixed-point semantics.

Scalar operations (`FixedNum`, `quantize`, `fx_add`, `fx_mul`) use Python
integers and are exact for any width up to 64 bits. The `*_array` helpers
mirror the same semantics on int64 mantissa vectors for the layer engines
and are exact for W <= 32 (intermediate products need 2W-1 bits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "FixedFormat",
    "FixedNum",
    "quantize",
    "fx_add",
    "fx_mul",
    "to_real",
    "parse_format",
    "format_str",
    "quantize_array",
    "to_real_array",
]

MAX_WIDTH = 64
# the layer kernels evaluate each assignment's expression exactly in int64
# before the single rounding; the widest such expression is the update's
# lr*dz*x triple product, so 3(W-1)+2 bits must stay under 63
ARRAY_MAX_WIDTH = 21


@dataclass(frozen=True)
class FixedFormat:
    """Signed saturated fixed-point format <W,I>; I includes the sign bit."""

    W: int
    I: int

    def __post_init__(self):
        if not (1 <= self.I <= self.W <= MAX_WIDTH):
            raise ValueError(f"invalid fixed-point format <{self.W},{self.I}>: need 1 <= I <= W <= {MAX_WIDTH}")

    @property
    def frac_bits(self) -> int:
        return self.W - self.I

    @property
    def delta(self) -> float:
        """Quantization step 2^-(W-I)."""
        return 2.0 ** -self.frac_bits

    @property
    def r_pos(self) -> float:
        """Largest representable value, 2^(I-1) - delta."""
        return self.m_max * self.delta

    @property
    def r_neg(self) -> float:
        """Smallest representable value, -2^(I-1)."""
        return self.m_min * self.delta

    @property
    def m_max(self) -> int:
        return (1 << (self.W - 1)) - 1

    @property
    def m_min(self) -> int:
        return -(1 << (self.W - 1))

    def __str__(self) -> str:
        return f"{self.W},{self.I}"


@dataclass(frozen=True)
class FixedNum:
    """A saturated value: mantissa * 2^-frac_bits in a given format."""

    m: int
    fmt: FixedFormat

    def __post_init__(self):
        if not (self.fmt.m_min <= self.m <= self.fmt.m_max):
            raise ValueError(f"mantissa {self.m} outside <{self.fmt}> range")

    @property
    def value(self) -> float:
        return self.m * self.fmt.delta

    def __float__(self) -> float:
        return self.value


def _round_half_even_shift(v: int, n: int) -> int:
    """Round v / 2^n to the nearest integer, ties to even. Exact for ints."""
    if n <= 0:
        return v << (-n)
    q, r = divmod(v, 1 << n)  # divmod floors, so r >= 0
    half = 1 << (n - 1)
    if r > half or (r == half and (q & 1)):
        q += 1
    return q


def _saturate(m: int, fmt: FixedFormat) -> int:
    if m > fmt.m_max:
        return fmt.m_max
    if m < fmt.m_min:
        return fmt.m_min
    return m


def quantize(z: float, fmt: FixedFormat) -> FixedNum:
    """Round z to the format grid (half-to-even) and saturate into range.

    Idempotent on representable values. The scaling z * 2^frac_bits is a
    power-of-two float operation and therefore exact, so the rounding
    decision is made on the true value of z.
    """
    z = float(z)
    if not math.isfinite(z):
        raise ValueError(f"cannot quantize non-finite value {z!r}")
    if z >= fmt.r_pos:
        return FixedNum(fmt.m_max, fmt)
    if z <= fmt.r_neg:
        return FixedNum(fmt.m_min, fmt)
    scaled = z * (1 << fmt.frac_bits)
    return FixedNum(int(round(scaled)), fmt)  # builtin round: half-to-even


def to_real(a: FixedNum) -> float:
    """Exact real value of the stored mantissa."""
    return a.value


def fx_add(a: FixedNum, b: FixedNum, out_fmt: FixedFormat) -> FixedNum:
    """Exact wide sum of the operands, then round/saturate to out_fmt."""
    fa, fb, fo = a.fmt.frac_bits, b.fmt.frac_bits, out_fmt.frac_bits
    f = max(fa, fb)
    wide = (a.m << (f - fa)) + (b.m << (f - fb))
    m = _round_half_even_shift(wide, f - fo)
    return FixedNum(_saturate(m, out_fmt), out_fmt)


def fx_mul(a: FixedNum, b: FixedNum, out_fmt: FixedFormat) -> FixedNum:
    """Exact wide product of the operands, then round/saturate to out_fmt."""
    shift = a.fmt.frac_bits + b.fmt.frac_bits - out_fmt.frac_bits
    m = _round_half_even_shift(a.m * b.m, shift)
    return FixedNum(_saturate(m, out_fmt), out_fmt)


def parse_format(s: str) -> FixedFormat | None:
    """Parse a "W,I" format string; "float" selects IEEE-double mode (None)."""
    s = s.strip()
    if s.lower() == "float":
        return None
    parts = s.split(",")
    if len(parts) != 2:
        raise ValueError(f"bad format string {s!r}: expected 'W,I' or 'float'")
    try:
        w, i = int(parts[0]), int(parts[1])
    except ValueError as e:
        raise ValueError(f"bad format string {s!r}: {e}") from None
    return FixedFormat(w, i)


def format_str(fmt: FixedFormat | None) -> str:
    return "float" if fmt is None else str(fmt)


# ---------------------------------------------------------------------------
# Vectorized mantissa helpers (int64; exact for W <= 32)
# ---------------------------------------------------------------------------


def _check_array_width(fmt: FixedFormat):
    if fmt.W > ARRAY_MAX_WIDTH:
        raise ValueError(f"array engine supports W <= {ARRAY_MAX_WIDTH}, got <{fmt}>")


def quantize_array(z: np.ndarray, fmt: FixedFormat) -> np.ndarray:
    """Vectorized quantize: float64 values -> int64 mantissas.

    np.rint rounds half-to-even; the pre-clip to the representable range
    cannot disturb in-range rounding because range endpoints sit on the grid.
    """
    _check_array_width(fmt)
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise ValueError("cannot quantize non-finite values")
    clipped = np.clip(z, fmt.r_neg, fmt.r_pos)
    return np.rint(clipped * (1 << fmt.frac_bits)).astype(np.int64)


def to_real_array(m: np.ndarray, fmt: FixedFormat) -> np.ndarray:
    return np.asarray(m, dtype=np.float64) * fmt.delta


def exact_mantissa(z, fmt: FixedFormat) -> int:
    """Quantize an exact rational (or float) via Fraction arithmetic.

    Slow path used for compiled constants (learning rates, grid scales)
    where float round-off must not leak into the stored mantissa.
    """
    m = round(Fraction(z) * (1 << fmt.frac_bits))  # Fraction round: half-even
    return _saturate(m, fmt)
