"""Deterministic 64-bit generator for streams and parameter init.

SplitMix64 state update with the standard finalizer, Box-Muller for
Gaussians. Fully specified here (no library RNG) so that identical seeds
reproduce streams bit-for-bit regardless of platform or numpy version.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    def __init__(self, seed: int):
        self._state = seed & _MASK
        self._spare_gauss: float | None = None

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.next_float()

    def next_index(self, n: int) -> int:
        """Uniform in {0..n-1} (floor of a scaled 53-bit uniform)."""
        return int(self.next_float() * n)

    def choice4(self) -> int:
        """Uniform in {0,1,2,3} from the top two bits."""
        return self.next_u64() >> 62

    def gaussian(self) -> float:
        """Standard normal via Box-Muller; consumes two uniforms per pair."""
        if self._spare_gauss is not None:
            g, self._spare_gauss = self._spare_gauss, None
            return g
        u1 = self.next_float()
        u2 = self.next_float()
        r = math.sqrt(-2.0 * math.log(1.0 - u1))  # 1-u1 in (0,1], log finite
        self._spare_gauss = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates using next_index for the swap target."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_index(i + 1)
            items[i], items[j] = items[j], items[i]
