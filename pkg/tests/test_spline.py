"""Grid indexing and basis-table properties."""

import numpy as np
import pytest

from splinefx.fixedpoint import FixedFormat, quantize
from splinefx.spline import (CellIndex, GridSpec, build_basis_lut, eval_basis,
                             eval_deriv, locate, segment_basis)

GRID = GridSpec(-1.0, 1.0, G=10, p=2, F=8)
FINE = FixedFormat(32, 8)  # fine input format so example reals survive quantization


class TestGridSpec:
    def test_derived(self):
        assert GRID.H == 0.2
        assert GRID.s == 3
        assert GRID.coeff_count == 12
        assert GRID.n_bins == 256

    @pytest.mark.parametrize("kw", [
        dict(x_min=1.0, x_max=-1.0, G=10, p=2),
        dict(x_min=0.0, x_max=1.0, G=0, p=2),
        dict(x_min=0.0, x_max=1.0, G=5, p=-1),
        dict(x_min=0.0, x_max=1.0, G=5, p=2, F=0),
        dict(x_min=0.0, x_max=1.0, G=5, p=2, F=20),
    ])
    def test_invalid_rejected(self, kw):
        with pytest.raises(ValueError):
            GridSpec(**kw)


class TestBasisLut:
    def test_order_zero_is_constant_one(self):
        lut = build_basis_lut(0, 8)
        assert np.all(lut.b == 1.0)
        assert np.all(lut.db == 0.0)

    def test_quadratic_midcell(self):
        lut = build_basis_lut(2, 8)
        # closed forms (1-xi)^2/2, (-2xi^2+2xi+1)/2, xi^2/2 at xi=0.5 and 0
        assert np.allclose(lut.b[:, 128], [0.125, 0.75, 0.125], atol=0, rtol=0)
        assert np.allclose(lut.b[:, 0], [0.5, 0.5, 0.0], atol=0, rtol=0)

    def test_unsupported_order(self):
        with pytest.raises(ValueError):
            build_basis_lut(4, 8)

    @pytest.mark.parametrize("p", [0, 1, 2, 3])
    def test_partition_of_unity(self, p):
        lut = build_basis_lut(p, 8)
        assert np.max(np.abs(lut.b.sum(axis=0) - 1.0)) <= 2.0**-20
        assert np.max(np.abs(lut.db.sum(axis=0))) <= 2.0**-20

    @pytest.mark.parametrize("p", [0, 1, 2, 3])
    def test_values_in_unit_interval(self, p):
        lut = build_basis_lut(p, 8)
        assert lut.b.min() >= 0.0 and lut.b.max() <= 1.0

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_derivative_consistency(self, p):
        """Table slopes match central differences of a random spline (1e-3 rel)."""
        rng = np.random.default_rng(42)
        lut = build_basis_lut(p, 8)
        w = rng.uniform(-1.0, 1.0, size=p + 1)
        for u in range(8, 248, 16):
            delta = 4 / 256
            xi = u / 256
            fwd = w @ segment_basis(p, xi + delta)
            bwd = w @ segment_basis(p, xi - delta)
            fd = (fwd - bwd) / (2 * delta)
            an = w @ lut.db[:, u]
            if abs(an) > 1e-6:
                assert abs(fd - an) / abs(an) <= 1e-3

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_continuity_across_cells(self, p):
        """Spline value at (k, last bin) vs (k+1, bin 0): within one bin of slope."""
        rng = np.random.default_rng(43)
        lut = build_basis_lut(p, 8)
        coeffs = rng.uniform(-1.0, 1.0, size=16 + p)
        for k in range(15):
            left = coeffs[k:k + p + 1] @ lut.b[:, 255]
            right = coeffs[k + 1:k + p + 2] @ lut.b[:, 0]
            slope = abs(coeffs[k:k + p + 1] @ lut.db[:, 255])
            assert abs(left - right) <= (slope + 1.0) / 256


class TestLocate:
    def test_lower_edge(self):
        assert locate(quantize(-1.0, FINE), GRID) == CellIndex(0, 0)

    def test_interior(self):
        # t = (0.35+1)/0.2 = 6.75 -> k=6, u = 0.75*256 = 192
        assert locate(quantize(0.35, FINE), GRID) == CellIndex(6, 192)

    def test_clamp_above(self):
        assert locate(quantize(5.0, FINE), GRID) == CellIndex(9, 255)

    def test_clamp_below(self):
        assert locate(quantize(-7.0, FINE), GRID) == CellIndex(0, 0)

    def test_exact_boundaries(self):
        # every <6,2> value on this grid lands exactly on a bin boundary
        f = FixedFormat(6, 2)
        for m in range(-16, 16):
            x = quantize(m / 16, f)
            idx = locate(x, GRID)
            t_bins = (m / 16 + 1.0) / 0.2 * 256
            assert idx.k * 256 + idx.u == int(t_bins)

    def test_scale_is_exact_integer(self):
        # t*2^F = (m/16 + 1) / 0.2 * 256 = 80*m + 1280 for <6,2> mantissas
        assert GRID.locate_scale(FixedFormat(6, 2)) == (80, -1280, 1)


class TestEval:
    def test_local_support_size(self):
        lut = build_basis_lut(2, 8)
        assert eval_basis(lut, CellIndex(3, 77)).shape == (3,)
        assert eval_deriv(lut, CellIndex(3, 77), GRID).shape == (3,)

    def test_deriv_scaled_by_h(self):
        lut = build_basis_lut(2, 8)
        idx = CellIndex(0, 64)
        assert np.allclose(eval_deriv(lut, idx, GRID), lut.db[:, 64] / GRID.H)
