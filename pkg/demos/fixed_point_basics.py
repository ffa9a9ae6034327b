#!/usr/bin/env python3
"""Saturated fixed-point numbers: formats, rounding, saturation.

A <W,I> format keeps W total bits with I integer bits (both counting the
sign), so the step is 2^-(W-I) and the range is [-2^(I-1), 2^(I-1) - step].
Quantization rounds half-to-even and clips into range; arithmetic computes
exact wide results and re-quantizes into the destination format.
"""

from splinefx import FixedFormat, fx_add, fx_mul, quantize, to_real

fmt = FixedFormat(6, 2)
print(f"format <{fmt}>: step {fmt.delta}, range [{fmt.r_neg}, {fmt.r_pos}]")

print("\nquantization (round half-to-even, then saturate):")
for z in (0.0, 0.1, 0.03125, 0.09375, 1.9, 3.0, -5.0):
    q = quantize(z, fmt)
    print(f"  {z:>8} -> {q.value:>8}  (mantissa {q.m})")

print("\narithmetic saturates instead of overflowing:")
a = quantize(1.5, fmt)
print(f"  1.5 * 1.5 -> {fx_mul(a, a, fmt).value}   (true 2.25 > r_pos)")
b = quantize(0.0625, fmt)
print(f"  0.0625 + 0.0625 -> {fx_add(b, b, fmt).value}   (exactly representable)")

print("\nvalues survive round trips exactly:")
for z in (0.5, -2.0, 1.9375):
    print(f"  {z} -> mantissa {quantize(z, fmt).m} -> {to_real(quantize(z, fmt))}")

wide = FixedFormat(16, 4)
print(f"\na finer format <{wide}> resolves the same inputs more closely:")
for z in (0.1, 0.7071):
    print(f"  {z} -> {quantize(z, wide).value}")
