"""Uniform-grid B-spline machinery: cell indexing and basis lookup tables.

A grid covers [x_min, x_max] with G cells of width H. For spline order p,
exactly s = p+1 basis functions are nonzero inside any cell; their
restrictions to one cell are fixed segment polynomials of the in-cell
coordinate xi in [0,1). Values and unit-cell slopes are tabulated at
2^F sample points per cell (read-only ROM semantics; entries are stored
at full double precision and quantized by consumers at read time).

Cell location is index arithmetic only: t = (x - x_min)/H is held with F
fractional bits, the integer part is the cell k and the low F bits are the
table bin u. For fixed-point inputs the scaling is done in exact integer
arithmetic so bin boundaries never suffer float round-off.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .fixedpoint import FixedFormat, FixedNum

__all__ = [
    "GridSpec",
    "BasisLut",
    "CellIndex",
    "build_basis_lut",
    "locate",
    "eval_basis",
    "eval_deriv",
    "segment_basis",
    "segment_deriv",
]

SUPPORTED_ORDERS = (0, 1, 2, 3)
MAX_LUT_BITS = 16


@dataclass(frozen=True)
class GridSpec:
    """Uniform spline grid: bounds, cell count G, order p, LUT address bits F."""

    x_min: float
    x_max: float
    G: int
    p: int
    F: int = 8

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if self.G < 1:
            raise ValueError(f"grid size must be >= 1, got {self.G}")
        if self.p < 0:
            raise ValueError(f"spline order must be >= 0, got {self.p}")
        if not (1 <= self.F <= MAX_LUT_BITS):
            raise ValueError(f"LUT bits must be in [1, {MAX_LUT_BITS}], got {self.F}")

    @property
    def H(self) -> float:
        return (self.x_max - self.x_min) / self.G

    @property
    def s(self) -> int:
        """Active support size: s = p + 1 coefficients per cell."""
        return self.p + 1

    @property
    def coeff_count(self) -> int:
        """Stored coefficients per edge: cell k uses the window [k, k+p]."""
        return self.G + self.p

    @property
    def n_bins(self) -> int:
        return 1 << self.F

    def locate_scale(self, fmt: FixedFormat) -> tuple[int, int, int]:
        """Exact integer constants (n1, n0, d): t*2^F = (m*n1 - n0)/d.

        m is the input mantissa in `fmt`. Derived with Fraction arithmetic
        from the exact binary expansions of the grid bounds, so the binned
        index floor((x - x_min)/H * 2^F) is computed without rounding.
        """
        span = Fraction(self.x_max) - Fraction(self.x_min)
        a = Fraction(1, 1 << fmt.frac_bits) * (self.n_bins * self.G) / span
        b = Fraction(self.x_min) * (self.n_bins * self.G) / span
        d = a.denominator * b.denominator // np.gcd(a.denominator, b.denominator)
        n1 = a.numerator * (d // a.denominator)
        n0 = b.numerator * (d // b.denominator)
        return int(n1), int(n0), int(d)

    def locate_scale_fits_int64(self, fmt: FixedFormat) -> bool:
        """True when the exact scale is safe for int64 kernel arithmetic."""
        n1, n0, d = self.locate_scale(fmt)
        max_m = 1 << (fmt.W - 1)
        return abs(n1) * max_m + abs(n0) < (1 << 62) and d < (1 << 62)


@dataclass(frozen=True)
class CellIndex:
    """Cell k in [0, G-1] plus LUT bin u in [0, 2^F - 1]."""

    k: int
    u: int


@dataclass(frozen=True)
class BasisLut:
    """Tabulated basis values b[r][u] and unit-cell slopes db[r][u].

    Rows r = 0..p weight the coefficient window left to right; column u
    samples xi_u = u / 2^F. Slopes are per unit cell; eval_deriv applies
    the 1/H chain factor so one table serves every grid of equal order.
    """

    p: int
    F: int
    b: np.ndarray = field(repr=False)
    db: np.ndarray = field(repr=False)

    @property
    def s(self) -> int:
        return self.p + 1


def segment_basis(p: int, xi: float) -> np.ndarray:
    """Values of the s nonzero uniform B-spline segments at xi in [0,1)."""
    if p == 0:
        return np.array([1.0])
    if p == 1:
        return np.array([1.0 - xi, xi])
    if p == 2:
        return np.array([
            0.5 * (1.0 - xi) ** 2,
            0.5 * (-2.0 * xi * xi + 2.0 * xi + 1.0),
            0.5 * xi * xi,
        ])
    if p == 3:
        return np.array([
            (1.0 - xi) ** 3 / 6.0,
            (3.0 * xi**3 - 6.0 * xi * xi + 4.0) / 6.0,
            (-3.0 * xi**3 + 3.0 * xi * xi + 3.0 * xi + 1.0) / 6.0,
            xi**3 / 6.0,
        ])
    raise ValueError(f"unsupported spline order {p}; expected one of {SUPPORTED_ORDERS}")


def segment_deriv(p: int, xi: float) -> np.ndarray:
    """d/dxi of segment_basis (unit-cell slope, not yet scaled by 1/H)."""
    if p == 0:
        return np.array([0.0])
    if p == 1:
        return np.array([-1.0, 1.0])
    if p == 2:
        return np.array([xi - 1.0, 1.0 - 2.0 * xi, xi])
    if p == 3:
        return np.array([
            -0.5 * (1.0 - xi) ** 2,
            0.5 * (3.0 * xi * xi - 4.0 * xi),
            0.5 * (-3.0 * xi * xi + 2.0 * xi + 1.0),
            0.5 * xi * xi,
        ])
    raise ValueError(f"unsupported spline order {p}; expected one of {SUPPORTED_ORDERS}")


def build_basis_lut(p: int, F: int) -> BasisLut:
    """Tabulate basis values/slopes at xi_u = u/2^F over the unit cell."""
    if p not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported spline order {p}; expected one of {SUPPORTED_ORDERS}")
    if not (1 <= F <= MAX_LUT_BITS):
        raise ValueError(f"LUT bits must be in [1, {MAX_LUT_BITS}], got {F}")
    n = 1 << F
    b = np.empty((p + 1, n))
    db = np.empty((p + 1, n))
    for u in range(n):
        xi = u / n
        b[:, u] = segment_basis(p, xi)
        db[:, u] = segment_deriv(p, xi)
    b.setflags(write=False)
    db.setflags(write=False)
    return BasisLut(p=p, F=F, b=b, db=db)


def locate(x: FixedNum, grid: GridSpec) -> CellIndex:
    """Map a fixed-point value to its (cell, bin) index, clamping to the grid.

    t is truncated to F fractional bits (taking bits, as hardware does) and
    clamped to [0, G - 2^-F]; k = floor(t), u = the F fractional bits.
    """
    n1, n0, d = grid.locate_scale(x.fmt)
    tm = (x.m * n1 - n0) // d
    tm = max(0, min(grid.G * grid.n_bins - 1, tm))
    return CellIndex(k=tm >> grid.F, u=tm & (grid.n_bins - 1))


def eval_basis(lut: BasisLut, idx: CellIndex) -> np.ndarray:
    """The s active basis values at the indexed bin."""
    return lut.b[:, idx.u].copy()


def eval_deriv(lut: BasisLut, idx: CellIndex, grid: GridSpec) -> np.ndarray:
    """The s active d/dx values at the indexed bin (unit slope times 1/H)."""
    return lut.db[:, idx.u] / grid.H
